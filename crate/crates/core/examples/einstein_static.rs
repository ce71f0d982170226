//! Tunes the cosmological constant so that the pressure gradient vanishes at
//! the centre, which gives Einstein's static universe of constant density.

use std::f64::consts::PI;
use tovds::eos::EosSpec;
use tovds::model::{solve_star, ModelInput};
use tovds::Constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eos = EosSpec::polytrope(1.0, 1.5, 1.0)?;
    let rho_c = 1e-2;
    let p_c = eos.pressure_of_density(rho_c)?;
    let lambda = 4.0 * PI * (rho_c + 3.0 * p_c);

    let input = ModelInput::from_density(rho_c, lambda, eos, Constants::GEOMETRIZED).with_r_max(2.0);
    let (profile, outcome) = solve_star(&input)?;
    println!("Lambda = {lambda:.10}");
    println!("constant pressure detected: {}", profile.constant_pressure);
    println!("outcome: {}", outcome.tag());

    let spread = profile
        .samples
        .iter()
        .map(|s| (s.p - p_c).abs() / p_c)
        .fold(0.0, f64::max);
    println!("max relative pressure deviation: {spread:.3e}");
    Ok(())
}
