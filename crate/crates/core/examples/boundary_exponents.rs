//! Fits the power law of the density near the vacuum boundary.

use tovds::analysis::boundary_exponent_fit;
use tovds::eos::EosSpec;
use tovds::model::{solve_star, ModelInput};
use tovds::Constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for gamma in [1.4, 1.5, 5.0 / 3.0] {
        let eos = EosSpec::polytrope(1.0, gamma, 1.0)?;
        let (profile, _) = solve_star(&ModelInput::from_scaled(1e-2, 1e-3, eos, Constants::GEOMETRIZED)?)?;
        let fit = boundary_exponent_fit(&profile)?;
        println!(
            "gamma = {gamma:.4}: exponent {:.8} (expected {:.8}), amplitude rel err {:.2e}, {} samples",
            fit.exponent, fit.exponent_target, fit.amplitude_rel_err, fit.samples
        );
    }
    Ok(())
}
