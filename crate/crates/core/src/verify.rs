//! Self-verification suite: twelve numbered checks against closed forms and
//! reference values, each reporting its measured quantities.

use crate::analysis::{nan_max, boundary_exponent_fit, lane_emden_first_zero, lane_emden_solution, mu1_analytic, perturbation_compare, regime_sweep};
use crate::eos::{density_integral, fermi_eos, pressure_integral, EosSpec, FermiEosParams};
use crate::export::{csv_bytes, json_bytes, Artifacts, DIMENSIONLESS};
use crate::integrate::StepControl;
use crate::metric::{continuity_report, horizons, MetricPatch, Side};
use crate::model::{boundary_quantities, solve_scaled, solve_star, ModelInput, ModelOutcome, ScaledClass, SolutionProfile, SolveOptions};
use crate::numeric::integrate;
use crate::odecore::{kappa, rhs_lane_emden, ScalingParams};
use crate::Constants;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// First zero of the `μ = 2` Lane–Emden function.
pub const XI1_INDEX_TWO: f64 = 4.352_874_595_946;

/// Scaled-parameter grid used by the regime check: zero plus half-decades
/// from 1e-6 to 1e-2.
pub const REGIME_GRID: [f64; 10] = [
    0.0,
    1e-6,
    3.162_277_660_168_379_5e-6,
    1e-5,
    3.162_277_660_168_379_4e-5,
    1e-4,
    3.162_277_660_168_379_6e-4,
    1e-3,
    3.162_277_660_168_379_4e-3,
    1e-2,
];

const GEO: Constants = Constants::GEOMETRIZED;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub quantity: String,
    pub value: f64,
    /// Upper bound on `value`; `None` for informational entries and flags.
    pub limit: Option<f64>,
    pub pass: bool,
}

impl Measurement {
    fn at_most(quantity: impl Into<String>, value: f64, limit: f64) -> Self {
        Measurement {
            quantity: quantity.into(),
            value,
            limit: Some(limit),
            pass: value <= limit,
        }
    }

    fn flag(quantity: impl Into<String>, ok: bool) -> Self {
        Measurement {
            quantity: quantity.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: None,
            pass: ok,
        }
    }

    fn info(quantity: impl Into<String>, value: f64) -> Self {
        Measurement {
            quantity: quantity.into(),
            value,
            limit: None,
            pass: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub measurements: Vec<Measurement>,
    /// Failure message when the check could not be evaluated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub criteria: Vec<CriterionResult>,
}

type Check = fn() -> Result<Vec<Measurement>, String>;

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "lane_emden_index_one_zero"),
    (2, "lane_emden_de_sitter_index_one"),
    (3, "einstein_static_constant_pressure"),
    (4, "boundary_enthalpy_slope"),
    (5, "metric_c2_patching"),
    (6, "horizon_algebra"),
    (7, "boundary_density_exponent"),
    (8, "small_parameter_regime"),
    (9, "small_lambda_persistence"),
    (10, "zero_lambda_monotone"),
    (11, "eos_self_consistency"),
    (12, "determinism"),
];

fn check_fn(id: u8) -> Option<Check> {
    Some(match id {
        1 => lane_emden_index_one,
        2 => lane_emden_de_sitter,
        3 => einstein_static,
        4 => boundary_slope,
        5 => metric_patching,
        6 => horizon_algebra,
        7 => density_exponent,
        8 => small_parameter_regime,
        9 => small_lambda_persistence,
        10 => zero_lambda_monotone,
        11 => eos_consistency,
        _ => return None,
    })
}

/// Runs one numbered check. Check 12 reruns checks 1–11 and compares the
/// serialized results byte for byte.
pub fn run_criterion(id: u8) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map_or("unknown", |(_, n)| n)
        .to_string();
    let outcome = match id {
        12 => determinism(),
        _ => match check_fn(id) {
            Some(f) => f(),
            None => Err(format!("no check numbered {id}")),
        },
    };
    match outcome {
        Ok(measurements) => CriterionResult {
            id,
            name,
            pass: measurements.iter().all(|m| m.pass),
            measurements,
            error: None,
        },
        Err(e) => CriterionResult {
            id,
            name,
            pass: false,
            measurements: Vec::new(),
            error: Some(e),
        },
    }
}

pub fn run_all() -> VerifyReport {
    let criteria: Vec<_> = CRITERIA.iter().map(|(id, _)| run_criterion(*id)).collect();
    VerifyReport {
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: u8,
    criterion: &'a str,
    quantity: &'a str,
    value: f64,
    limit: Option<f64>,
    pass: bool,
}

/// `verify.json` and `verify.csv` (one row per measurement).
pub fn artifacts(report: &VerifyReport) -> Result<Artifacts, crate::export::ExportError> {
    let mut rows = Vec::new();
    for c in &report.criteria {
        for m in &c.measurements {
            rows.push(CsvRow {
                id: c.id,
                criterion: &c.name,
                quantity: &m.quantity,
                value: m.value,
                limit: m.limit,
                pass: m.pass,
            });
        }
        if let Some(e) = &c.error {
            rows.push(CsvRow {
                id: c.id,
                criterion: &c.name,
                quantity: e,
                value: f64::NAN,
                limit: None,
                pass: false,
            });
        }
    }
    let mut a = Artifacts::default();
    a.add("verify.json", json_bytes(DIMENSIONLESS, report)?);
    a.add("verify.csv", csv_bytes(DIMENSIONLESS, &rows)?);
    Ok(a)
}

fn determinism() -> Result<Vec<Measurement>, String> {
    let once = || -> Result<Vec<u8>, String> {
        let criteria: Vec<_> = (1..=11).map(run_criterion).collect();
        serde_json::to_vec(&criteria).map_err(|e| e.to_string())
    };
    let (a, b) = (once()?, once()?);
    Ok(vec![Measurement::flag("repeat_runs_byte_identical", a == b)])
}

fn lane_emden_index_one() -> Result<Vec<Measurement>, String> {
    let xi = lane_emden_first_zero(1.0, 0.0)
        .map_err(|e| e.to_string())?
        .ok_or("no zero found")?;
    Ok(vec![
        Measurement::info("xi1", xi),
        Measurement::at_most("abs_err_vs_pi", (xi - PI).abs(), 1e-8),
    ])
}

fn lane_emden_de_sitter() -> Result<Vec<Measurement>, String> {
    let mut out = Vec::new();
    for lambda in [0.5, 0.75] {
        let end = 4.0 * PI;
        let sol = lane_emden_solution(1.0, lambda, end).map_err(|e| e.to_string())?;
        let r0 = sol.x_start();
        let n = 4000;
        let sup = (0..=n)
            .map(|i| {
                let r = r0 + (end - r0) * i as f64 / n as f64;
                let u = sol.eval(r).map_or(f64::NAN, |y| y[1]);
                (u - mu1_analytic(lambda, r).0).abs()
            })
            .fold(0.0, nan_max);
        let rising = (1..200).any(|i| {
            let r = 1.5 * PI + 0.5 * PI * i as f64 / 200.0;
            sol.eval(r).is_some_and(|y| rhs_lane_emden(r, &y, 1.0, lambda)[1] > 0.0)
        });
        out.push(Measurement::at_most(format!("sup_err_lambda_{lambda}"), sup, 1e-8));
        out.push(Measurement::flag(format!("rising_in_3pi/2..2pi_lambda_{lambda}"), rising));
    }
    Ok(out)
}

fn einstein_static() -> Result<Vec<Measurement>, String> {
    let eos = poly(1.5)?;
    let rho_c: f64 = 0.01;
    let p_c = eos.pressure_of_density(rho_c).map_err(|e| e.to_string())?;
    let lambda = 4.0 * PI * (rho_c + 3.0 * p_c);
    let l = 8.0 * PI * rho_c + lambda;
    let r_cap = 0.9 * (3.0 / l).sqrt();
    let input = ModelInput::from_density(rho_c, lambda, eos, GEO).with_r_max(r_cap);
    let (profile, outcome) = solve_star(&input).map_err(|e| e.to_string())?;
    let drift = profile.samples.iter().map(|s| (s.p / p_c - 1.0).abs()).fold(0.0, nan_max);
    Ok(vec![
        Measurement::flag("constant_pressure_detected", profile.constant_pressure),
        Measurement::flag("reaches_cap", matches!(outcome, ModelOutcome::Unterminated { .. })),
        Measurement::info("r_cap", r_cap),
        Measurement::at_most("max_rel_pressure_drift", drift, 1e-6),
    ])
}

fn poly(gamma: f64) -> Result<EosSpec, String> {
    EosSpec::polytrope(1.0, gamma, 1.0).map_err(|e| e.to_string())
}

fn short_model(gamma: f64, alpha: f64, beta: f64) -> Result<SolutionProfile, String> {
    let input = ModelInput::from_scaled(alpha, beta, poly(gamma)?, GEO).map_err(|e| e.to_string())?;
    let (profile, outcome) = solve_star(&input).map_err(|e| e.to_string())?;
    if !outcome.is_monotone_short() {
        return Err(format!("model (gamma {gamma}, alpha {alpha}, beta {beta}) is {}", outcome.tag()));
    }
    Ok(profile)
}

fn boundary_slope() -> Result<Vec<Measurement>, String> {
    let profile = short_model(1.5, 1e-2, 1e-3)?;
    let bq = boundary_quantities(&profile).map_err(|e| e.to_string())?;
    let u = |r: f64| profile.state_at(r).map_or(f64::NAN, |y| y[1]);
    let du = crate::metric::richardson_one_sided(&u, bq.r_plus, 1e-2 * bq.r_plus, -1.0, 1);
    let identity = bq.q_plus / (bq.r_plus * bq.r_plus * bq.kappa_plus);
    Ok(vec![
        Measurement::info("B", bq.b),
        Measurement::info("du_dr_inner", du),
        Measurement::at_most("rel_err_du_dr_vs_minus_B", (du + bq.b).abs() / bq.b, 1e-5),
        Measurement::at_most("rel_err_B_vs_Q/(r^2 kappa)", (bq.b - identity).abs() / identity, 1e-12),
    ])
}

fn metric_patching() -> Result<Vec<Measurement>, String> {
    let profile = short_model(1.5, 2e-2, 5e-3)?;
    let patch = MetricPatch::new(&profile).map_err(|e| e.to_string())?;
    let report = continuity_report(&patch).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for e in report.entries.iter().filter(|e| e.component == "g00" && e.order > 0) {
        let side = match e.side {
            Side::Interior => "inner",
            Side::Exterior => "outer",
        };
        let lim = crate::metric::CONTINUITY_TOL[e.order as usize];
        out.push(Measurement::at_most(format!("g00_d{}_{side}_rel_err", e.order), e.rel_err, lim));
    }
    out.push(Measurement::flag("all_one_sided_comparisons_pass", report.pass));
    Ok(out)
}

fn horizon_algebra() -> Result<Vec<Measurement>, String> {
    let cases = [(1.0, 0.05), (0.1, 1e-3), (1.0, 1.0 / 9.0 - 1e-6), (3.0, 1e-4), (1e-3, 10.0)];
    let mut root_res = 0.0f64;
    let mut fac_res = 0.0f64;
    for (m, lam) in cases {
        let h = horizons(m, lam, &GEO).map_err(|e| e.to_string())?;
        root_res = nan_max(root_res, nan_max(kappa(h.r_i, m, lam, &GEO).abs(), kappa(h.r_e, m, lam, &GEO).abs()));
        for i in 1..=1000 {
            let r = 1.3 * h.r_e * i as f64 / 1000.0;
            let k = kappa(r, m, lam, &GEO);
            fac_res = nan_max(fac_res, (k - h.factorized_kappa(r, lam)).abs() / k.abs().max(1.0));
        }
    }
    let pairs = [(1e-2, 1e-3), (2e-2, 5e-3), (1e-3, 1e-4), (0.1, 1e-2), (0.05, 0.05)];
    let bracketed = pairs
        .par_iter()
        .map(|&(a, b)| {
            let input = ModelInput::from_scaled(a, b, poly(1.5)?, GEO).map_err(|e| e.to_string())?;
            let (profile, outcome) = solve_star(&input).map_err(|e| e.to_string())?;
            if !outcome.is_monotone_short() {
                return Ok(None);
            }
            let patch = MetricPatch::new(&profile).map_err(|e| e.to_string())?;
            Ok(Some(patch.horizons_bracket_star()))
        })
        .collect::<Result<Vec<Option<bool>>, String>>()?;
    let short: Vec<bool> = bracketed.into_iter().flatten().collect();
    let d = horizons(1.0, 1.0 / 9.0, &GEO).map_err(|e| e.to_string())?;
    Ok(vec![
        Measurement::at_most("max_abs_kappa_at_roots", root_res, 1e-12),
        Measurement::at_most("max_factorization_residual", fac_res, 1e-10),
        Measurement::info("short_models_checked", short.len() as f64),
        Measurement::flag("r_I_lt_r_plus_lt_r_E", !short.is_empty() && short.iter().all(|&b| b)),
        Measurement::flag("double_root_flagged", d.degenerate),
        Measurement::at_most("double_root_err", nan_max((d.r_i - 3.0).abs(), (d.r_e - 3.0).abs()), 1e-8),
    ])
}

fn density_exponent() -> Result<Vec<Measurement>, String> {
    let mut out = Vec::new();
    for gamma in [1.4, 1.5, 1.7] {
        let profile = short_model(gamma, 1e-2, 1e-3)?;
        let fit = boundary_exponent_fit(&profile).map_err(|e| e.to_string())?;
        out.push(Measurement::info(format!("exponent_gamma_{gamma}"), fit.exponent));
        out.push(Measurement::at_most(format!("exponent_rel_err_gamma_{gamma}"), fit.exponent_rel_err, 0.02));
        out.push(Measurement::at_most(format!("amplitude_rel_err_gamma_{gamma}"), fit.amplitude_rel_err, 0.02));
    }
    Ok(out)
}

fn small_parameter_regime() -> Result<Vec<Measurement>, String> {
    let eos = poly(1.5)?;
    let sweep = regime_sweep(&eos, &REGIME_GRID, &REGIME_GRID, &StepControl::default(), &SolveOptions::default())
        .map_err(|e| e.to_string())?;
    let short = sweep.cells.iter().filter(|c| c.outcome == "MonotoneShort").count();
    let run = solve_scaled(1e-3, 1e-3, &eos, 1e3, &StepControl::default(), &SolveOptions::default())
        .map_err(|(e, _)| e.to_string())?;
    let ScaledClass::MonotoneShort { r_plus, .. } = run.class else {
        return Err(format!("(1e-3, 1e-3) is {}", run.class.tag()));
    };
    Ok(vec![
        Measurement::info("cells", sweep.cells.len() as f64),
        Measurement::flag("all_cells_monotone_short", short == sweep.cells.len()),
        Measurement::info("R_plus_at_1e-3", r_plus),
        Measurement::at_most("R_plus_rel_dev_from_xi1", (r_plus / XI1_INDEX_TWO - 1.0).abs(), 0.05),
    ])
}

fn small_lambda_persistence() -> Result<Vec<Measurement>, String> {
    let eos = poly(1.5)?;
    let rho_c = 0.01;
    let u_c = eos.u_of_density(rho_c).map_err(|e| e.to_string())?;
    // β is linear in Λ
    let beta_per_lambda = ScalingParams::new(u_c, 1.0, &eos, &GEO).map_err(|e| e.to_string())?.beta;
    let lambdas: Vec<f64> = [1e-4, 1e-3].iter().map(|b| b / beta_per_lambda).collect();
    let rows = perturbation_compare(rho_c, &eos, GEO, &lambdas).map_err(|e| e.to_string())?;
    let smallest = &rows[1];
    Ok(vec![
        Measurement::info("Lambda_smallest", smallest.lambda),
        Measurement::flag("smallest_lambda_monotone_short", smallest.outcome == "MonotoneShort"),
        Measurement::at_most("radius_shift", smallest.radius_shift.unwrap_or(f64::INFINITY), 0.05),
    ])
}

fn zero_lambda_monotone() -> Result<Vec<Measurement>, String> {
    let eos = poly(1.5)?;
    let grid: Vec<f64> = (0..10).map(|i| 1e-4 * 1e3f64.powf(i as f64 / 9.0)).collect();
    let outcomes = grid
        .par_iter()
        .map(|&rho| {
            solve_star(&ModelInput::from_density(rho, 0.0, eos.clone(), GEO))
                .map(|(_, o)| o.tag())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    let count = |tag: &str| outcomes.iter().filter(|o| **o == tag).count() as f64;
    Ok(vec![
        Measurement::info("models", outcomes.len() as f64),
        Measurement::info("monotone_short", count("MonotoneShort")),
        Measurement::at_most("non_monotone", count("NonMonotone"), 0.0),
    ])
}

fn eos_consistency() -> Result<Vec<Measurement>, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let poly = poly(1.5)?;
    let fermi_params = FermiEosParams::new(1.0, 1.0).map_err(|e| err(&e))?;
    let fermi = fermi_params.to_eos(8, crate::eos::DEFAULT_DELTA_OMEGA).map_err(|e| err(&e))?;

    let mut round_trip = 0.0f64;
    for eos in [&poly, &fermi] {
        for i in 0..=60 {
            let rho = 1e-6 * 10f64.powf(i as f64 / 10.0);
            let u = eos.u_of_density(rho).map_err(|e| err(&e))?;
            let back = eos.density_of_u(u).map_err(|e| err(&e))?;
            round_trip = nan_max(round_trip, (back / rho - 1.0).abs());
        }
    }

    // Ω ≡ 1: u = γ/(γ−1) c² log(1 + Aρ^{γ−1}/c²) against ∫ dP/(ρ + P/c²), ρ = s²
    let (a, g) = (poly.a(), poly.gamma());
    let mut closed_vs_quad = 0.0f64;
    for rho in [1e-6, 1e-4, 1e-2, 0.1, 1.0] {
        let closed = g / (g - 1.0) * (a * f64::powf(rho, g - 1.0)).ln_1p();
        let f = |s: f64| {
            let r = s * s;
            let p = a * r.powf(g);
            g * a * r.powf(g - 1.0) / (r + p) * 2.0 * s
        };
        let quad = integrate(f, 0.0, rho.sqrt(), 1e-15, 1e-12).map_err(|e| err(&e))?;
        closed_vs_quad = nan_max(closed_vs_quad, (closed / quad - 1.0).abs());
        let lib = poly.u_of_density(rho).map_err(|e| err(&e))?;
        closed_vs_quad = nan_max(closed_vs_quad, (lib / closed - 1.0).abs());
    }

    let mut fermi_quad = 0.0f64;
    for x in [0.05, 0.3, 0.499, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let qp = integrate(|q: f64| q.powi(4) / (1.0 + q * q).sqrt(), 0.0, x, 1e-300, 1e-13).map_err(|e| err(&e))?;
        let qd = integrate(|q: f64| q * q * (1.0 + q * q).sqrt(), 0.0, x, 1e-300, 1e-13).map_err(|e| err(&e))?;
        fermi_quad = nan_max(fermi_quad, (pressure_integral(x) / qp - 1.0).abs());
        fermi_quad = nan_max(fermi_quad, (density_integral(x) / qd - 1.0).abs());
    }

    let x = 1e-3;
    let h = 1e-4;
    let (r1, p1) = fermi_eos(x * (1.0 - h), &fermi_params).map_err(|e| err(&e))?;
    let (r2, p2) = fermi_eos(x * (1.0 + h), &fermi_params).map_err(|e| err(&e))?;
    let slope = (p2 / p1).ln() / (r2 / r1).ln();

    Ok(vec![
        Measurement::at_most("round_trip_rel_err", round_trip, 1e-8),
        Measurement::at_most("unit_omega_closed_form_vs_quadrature", closed_vs_quad, 1e-8),
        Measurement::at_most("fermi_closed_forms_vs_quadrature", fermi_quad, 1e-10),
        Measurement::info("fermi_low_density_slope", slope),
        Measurement::at_most("fermi_slope_dev_from_5/3", (slope - 5.0 / 3.0).abs(), 1e-3),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_grid_is_half_decades() {
        for (i, v) in REGIME_GRID.iter().enumerate().skip(1) {
            let expect = 10f64.powf(-6.0 + 0.5 * (i - 1) as f64);
            assert!((v / expect - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unknown_check_fails_cleanly() {
        let r = run_criterion(13);
        assert!(!r.pass && r.error.is_some());
    }

    #[test]
    fn every_check_passes() {
        for id in 1..=11 {
            let r = run_criterion(id);
            assert!(r.pass, "{r:?}");
        }
    }
}
