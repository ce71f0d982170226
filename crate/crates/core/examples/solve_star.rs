//! Solves a single polytropic star with a small cosmological constant and
//! prints its boundary quantities and a few interior samples.

use tovds::eos::EosSpec;
use tovds::model::{solve_star, ModelInput, ModelOutcome};
use tovds::Constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eos = EosSpec::polytrope(1.0, 5.0 / 3.0, 1.0)?;
    let input = ModelInput::from_density(1e-2, 1e-6, eos, Constants::GEOMETRIZED);
    let (profile, outcome) = solve_star(&input)?;

    match &outcome {
        ModelOutcome::MonotoneShort(bq) => {
            println!("r_+     = {:.10}", bq.r_plus);
            println!("m_+     = {:.10}", bq.m_plus);
            println!("kappa_+ = {:.10}", bq.kappa_plus);
            println!("B       = {:.10e}", bq.b);
        }
        other => println!("outcome: {}", other.tag()),
    }

    println!("\n{:>12} {:>14} {:>14} {:>14}", "r", "m", "P", "rho");
    let step = (profile.samples.len() / 8).max(1);
    for s in profile.samples.iter().step_by(step) {
        println!("{:12.6} {:14.6e} {:14.6e} {:14.6e}", s.r, s.m, s.p, s.rho);
    }
    Ok(())
}
