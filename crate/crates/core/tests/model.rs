use approx::assert_relative_eq;
use proptest::prelude::*;
use tovds::eos::EosSpec;
use tovds::model::{solve_star, ModelInput, ModelOutcome};
use tovds::Constants;

const GEO: Constants = Constants::GEOMETRIZED;

#[test]
fn homologous_models_agree_across_unit_systems() {
    let si = Constants::SI;
    let geo_eos = EosSpec::polytrope(1.0, 5.0 / 3.0, 1.0).unwrap();
    let si_eos = EosSpec::polytrope(5.38e3, 5.0 / 3.0, si.c).unwrap();
    let (alpha, beta) = (2e-2, 1e-3);
    let (gp, go) = solve_star(&ModelInput::from_scaled(alpha, beta, geo_eos, GEO).unwrap()).unwrap();
    let (sp, so) = solve_star(&ModelInput::from_scaled(alpha, beta, si_eos, si).unwrap()).unwrap();
    let (ModelOutcome::MonotoneShort(g), ModelOutcome::MonotoneShort(s)) = (go, so) else {
        panic!("expected monotone-short models");
    };
    // scaled radius and compactness are unit independent
    assert_relative_eq!(g.r_plus / gp.scaling.a, s.r_plus / sp.scaling.a, max_relative = 1e-9);
    assert_relative_eq!(g.kappa_plus, s.kappa_plus, max_relative = 1e-9);
    assert_relative_eq!(
        g.m_plus / gp.scaling.mass_unit(),
        s.m_plus / sp.scaling.mass_unit(),
        max_relative = 1e-9
    );
}

#[test]
fn neutron_star_scale_model_in_si() {
    let si = Constants::SI;
    let eos = EosSpec::polytrope(5.38e3, 5.0 / 3.0, si.c).unwrap();
    let (_, outcome) = solve_star(&ModelInput::from_density(1e17, 0.0, eos, si)).unwrap();
    let ModelOutcome::MonotoneShort(bq) = outcome else { panic!("{outcome:?}") };
    // radius of order ten kilometres, mass below a solar mass
    assert!(bq.r_plus > 5e3 && bq.r_plus < 5e4, "{}", bq.r_plus);
    assert!(bq.m_plus > 1e29 && bq.m_plus < 2e30, "{}", bq.m_plus);
    assert!(bq.kappa_plus > 0.0 && bq.kappa_plus < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn zero_lambda_models_are_short_and_monotone(log_rho in -4.0f64..-1.0, gamma in 1.35f64..1.75) {
        let eos = EosSpec::polytrope(1.0, gamma, 1.0).unwrap();
        let (profile, outcome) = solve_star(&ModelInput::from_density(10f64.powf(log_rho), 0.0, eos, GEO)).unwrap();
        let ModelOutcome::MonotoneShort(bq) = outcome else {
            return Err(TestCaseError::fail(format!("{outcome:?}")));
        };
        prop_assert!((bq.q_plus - bq.m_plus).abs() <= 1e-14 * bq.m_plus);
        // drift up to the integrator's relative tolerance is allowed
        let rtol = tovds::integrate::StepControl::default().rel_tol;
        let (m_tol, p_tol) = (rtol * bq.m_plus, rtol * profile.samples[0].p);
        for w in profile.samples.windows(2) {
            prop_assert!(w[1].r > w[0].r);
            prop_assert!(w[1].m >= w[0].m - m_tol);
            prop_assert!(w[1].p <= w[0].p + p_tol);
        }
        for s in profile.samples.iter().filter(|s| s.r < bq.r_plus) {
            prop_assert!(s.dpdr < 0.0);
            prop_assert!(s.kappa > 0.0);
        }
    }

    #[test]
    fn small_lambda_moves_radius_continuously(log_rho in -3.0f64..-1.5) {
        let eos = EosSpec::polytrope(1.0, 1.5, 1.0).unwrap();
        let rho = 10f64.powf(log_rho);
        let radius = |lambda: f64| {
            match solve_star(&ModelInput::from_density(rho, lambda, eos.clone(), GEO)).unwrap().1 {
                ModelOutcome::MonotoneShort(bq) => bq.r_plus,
                other => panic!("{other:?}"),
            }
        };
        let r0 = radius(0.0);
        let shifts: Vec<f64> = [1e-7, 1e-6, 1e-5].iter().map(|&l| (radius(l) - r0).abs() / r0).collect();
        prop_assert!(shifts[0] < shifts[1] && shifts[1] < shifts[2]);
        prop_assert!(shifts[2] < 0.05);
    }
}
