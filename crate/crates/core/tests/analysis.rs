mod common;

use approx::assert_relative_eq;
use common::rk4_first_zero;
use tovds::analysis::{lane_emden_first_zero, regime_sweep, scaled_limit_convergence};
use tovds::eos::EosSpec;
use tovds::integrate::StepControl;
use tovds::model::SolveOptions;

#[test]
fn first_zeros_match_fixed_step_oracle() {
    for mu in [0.5, 1.5, 2.0, 2.5, 3.0, 4.0] {
        let xi = lane_emden_first_zero(mu, 0.0).unwrap().unwrap();
        assert_relative_eq!(xi, rk4_first_zero(mu, 1e-3), max_relative = 1e-8);
    }
}

#[test]
fn de_sitter_term_pushes_zero_outward() {
    let mut last = 0.0;
    for lambda in [0.0, 0.01, 0.03, 0.05] {
        let xi = lane_emden_first_zero(1.5, lambda).unwrap().unwrap();
        assert!(xi > last);
        last = xi;
    }
}

#[test]
fn distance_to_newtonian_limit_shrinks_linearly() {
    let eps = [1e-1, 1e-2, 1e-3];
    let t = scaled_limit_convergence(1.5, &eps, &eps).unwrap();
    let d: Vec<f64> = t.rows.iter().map(|r| r.sup_distance).collect();
    assert!(d[0] > d[1] && d[1] > d[2]);
    // first-order dependence on the parameters
    let ratio = d[1] / d[2];
    assert!(ratio > 5.0 && ratio < 20.0, "{d:?}");
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let eos = EosSpec::polytrope(1.0, 1.5, 1.0).unwrap();
    let grid = [0.0, 1e-3, 1e-2, 0.1, 0.3];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| regime_sweep(&eos, &grid, &grid, &StepControl::default(), &SolveOptions::default()).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    assert_eq!(one.cells.len(), 25);
}
