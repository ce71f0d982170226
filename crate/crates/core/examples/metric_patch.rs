//! Glues the interior metric to Schwarzschild–de Sitter and checks continuity
//! of the metric components and their derivatives at the surface.

use tovds::eos::EosSpec;
use tovds::metric::{continuity_report, MetricPatch};
use tovds::model::{solve_star, ModelInput};
use tovds::Constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eos = EosSpec::polytrope(1.0, 1.5, 1.0)?;
    let input = ModelInput::from_scaled(2e-2, 5e-3, eos, Constants::GEOMETRIZED)?;
    let (profile, _) = solve_star(&input)?;
    let patch = MetricPatch::new(&profile)?;

    if let Some(h) = patch.horizons {
        println!("horizons: r_I = {:.6}, r_E = {:.6}", h.r_i, h.r_e);
    }
    println!("star radius: {:.6}", patch.bq.r_plus);

    let report = continuity_report(&patch)?;
    println!("\n{:>4} {:>9} {:>5} {:>12}", "comp", "side", "order", "rel err");
    for e in &report.entries {
        println!("{:>4} {:>9?} {:>5} {:12.3e}", e.component, e.side, e.order, e.rel_err);
    }
    println!("\ng00 continuity: {}", report.pass);
    println!("g11 continuity: {}", report.g11_pass);

    for r in [0.5 * patch.bq.r_plus, patch.bq.r_plus, 2.0 * patch.bq.r_plus] {
        let (g00, g11) = patch.g_components(r)?;
        println!("r = {r:10.4}: g00 = {g00:.8}, g11 = {g11:.8}");
    }
    Ok(())
}
