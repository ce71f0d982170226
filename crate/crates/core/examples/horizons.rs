//! Horizons of Schwarzschild–de Sitter for a range of masses below the
//! critical mass.

use tovds::metric::{critical_mass, de_sitter_radius, horizons};
use tovds::Constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = Constants::GEOMETRIZED;
    let lambda = 1e-4;
    let m_crit = critical_mass(lambda, &k);
    println!("Lambda = {lambda}, de Sitter radius = {:.4}, critical mass = {m_crit:.4}", de_sitter_radius(lambda));
    println!("{:>10} {:>12} {:>12}", "m", "r_I", "r_E");
    for frac in [0.01, 0.1, 0.5, 0.9, 0.999] {
        let m = frac * m_crit;
        let h = horizons(m, lambda, &k)?;
        println!("{m:10.4} {:12.6} {:12.6}", h.r_i, h.r_e);
    }
    Ok(())
}
