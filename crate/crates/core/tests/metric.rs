use proptest::prelude::*;
use tovds::eos::EosSpec;
use tovds::metric::{continuity_report, critical_mass, horizons, MetricPatch};
use tovds::model::{solve_star, ModelInput};
use tovds::odecore::kappa;
use tovds::Constants;

const GEO: Constants = Constants::GEOMETRIZED;

#[test]
fn patching_holds_for_fermi_gas() {
    let eos = tovds::eos::FermiEosParams::new(1.0, 1.0).unwrap().to_eos(8, 0.1).unwrap();
    let (profile, outcome) = solve_star(&ModelInput::from_scaled(1e-2, 1e-3, eos, GEO).unwrap()).unwrap();
    assert!(outcome.is_monotone_short(), "{outcome:?}");
    let patch = MetricPatch::new(&profile).unwrap();
    assert!(patch.horizons_bracket_star());
    let report = continuity_report(&patch).unwrap();
    assert!(report.pass, "{report:?}");
    // zeroth and first order of g11 still agree closely
    for e in report.entries.iter().filter(|e| e.component == "g11" && e.order < 2) {
        assert!(e.rel_err < 1e-4, "{e:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn continuity_across_scaled_parameters(alpha in 1e-3f64..5e-2, beta in 1e-4f64..1e-2, gamma in 1.4f64..1.6) {
        let eos = EosSpec::polytrope(1.0, gamma, 1.0).unwrap();
        let (profile, outcome) = solve_star(&ModelInput::from_scaled(alpha, beta, eos, GEO).unwrap()).unwrap();
        prop_assume!(outcome.is_monotone_short());
        let patch = MetricPatch::new(&profile).unwrap();
        prop_assert!(patch.horizons_bracket_star());
        let report = continuity_report(&patch).unwrap();
        for e in report.entries.iter().filter(|e| e.component == "g00") {
            prop_assert!(e.pass, "{:?}", e);
        }
    }
}

proptest! {
    #[test]
    fn horizon_roots(m in 1e-3f64..10.0, frac in 0.01f64..0.999) {
        // Λ below the critical value for this mass
        let lambda = (frac / (3.0 * m)).powi(2);
        prop_assert!(m < critical_mass(lambda, &GEO));
        let h = horizons(m, lambda, &GEO).unwrap();
        prop_assert!(2.0 * m < h.r_i && h.r_i < h.r_e);
        prop_assert!(kappa(h.r_i, m, lambda, &GEO).abs() < 1e-10);
        prop_assert!(kappa(h.r_e, m, lambda, &GEO).abs() < 1e-10);
        let mid = 0.5 * (h.r_i + h.r_e);
        prop_assert!(kappa(mid, m, lambda, &GEO) > 0.0);
    }
}
