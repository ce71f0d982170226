//! Classifies scaled models over a grid of the two smallness parameters and
//! reports the largest square of monotone-short models.

use tovds::analysis::regime_sweep;
use tovds::eos::EosSpec;
use tovds::integrate::StepControl;
use tovds::model::SolveOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eos = EosSpec::polytrope(1.0, 1.5, 1.0)?;
    let grid = [0.0, 1e-3, 1e-2, 0.05, 0.1, 0.3];
    let sweep = regime_sweep(&eos, &grid, &grid, &StepControl::default(), &SolveOptions::default())?;

    print!("{:>8}", "a \\ b");
    for b in &grid {
        print!("{b:>19}");
    }
    println!();
    for (i, a) in grid.iter().enumerate() {
        print!("{a:>8}");
        for j in 0..grid.len() {
            print!("{:>19}", sweep.cell(i, j).outcome);
        }
        println!();
    }
    println!("\nmonotone-short square up to {:?}", sweep.epsilon0_estimate);
    Ok(())
}
