//! Compares the truncated series for a degenerate Fermi gas with the exact
//! equation of state, then solves a star with it.

use tovds::eos::{fermi_eos, FermiEosParams};
use tovds::model::{solve_star, ModelInput, ModelOutcome};
use tovds::Constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FermiEosParams::new(1.0, 1.0)?;
    let eos = params.to_eos(8, 0.1)?;
    println!("{:>8} {:>14} {:>12}", "x", "rho", "P rel err");
    for x in [1e-3, 1e-2, 5e-2, 1e-1] {
        let (rho, p) = fermi_eos(x, &params)?;
        let err = (eos.pressure_of_density(rho)? - p).abs() / p;
        println!("{x:8} {rho:14.6e} {err:12.3e}");
    }

    let (_, outcome) = solve_star(&ModelInput::from_scaled(1e-2, 1e-3, eos, Constants::GEOMETRIZED)?)?;
    if let ModelOutcome::MonotoneShort(bq) = outcome {
        println!("\nstar: r_+ = {:.6}, m_+ = {:.6e}", bq.r_plus, bq.m_plus);
    }
    Ok(())
}
