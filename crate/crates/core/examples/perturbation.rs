//! Shift of the stellar radius as the cosmological constant is switched on.

use tovds::analysis::perturbation_compare;
use tovds::eos::EosSpec;
use tovds::Constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eos = EosSpec::polytrope(1.0, 1.5, 1.0)?;
    let rows = perturbation_compare(1e-2, &eos, Constants::GEOMETRIZED, &[1e-8, 1e-7, 1e-6, 1e-5, 1e-4])?;
    println!("{:>10} {:>16} {:>14} {:>12}", "Lambda", "outcome", "r_+", "shift");
    for r in rows {
        let fmt = |v: Option<f64>, p: usize| v.map_or("-".into(), |x| format!("{x:.p$e}"));
        println!("{:10.1e} {:>16} {:>14} {:>12}", r.lambda, r.outcome, fmt(r.r_plus, 6), fmt(r.radius_shift, 3));
    }
    Ok(())
}
