//! First zeros of the Lane–Emden and Lane–Emden–de Sitter equations.

use tovds::analysis::{lane_emden_first_zero, mu1_analytic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>5} {:>8} {:>16}", "mu", "lambda", "first zero");
    for mu in [0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
        for lambda in [0.0, 0.02] {
            let zero = lane_emden_first_zero(mu, lambda)?;
            let shown = zero.map_or("none".to_string(), |z| format!("{z:.12}"));
            println!("{mu:5} {lambda:8} {shown:>16}");
        }
    }

    // index one has a closed form
    let lambda = 0.02;
    let numeric = lane_emden_first_zero(1.0, lambda)?.expect("zero exists");
    let (u, _) = mu1_analytic(lambda, numeric);
    println!("\nclosed-form U at the numerical zero for mu = 1: {u:.3e}");
    Ok(())
}
