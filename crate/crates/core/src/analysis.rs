//! Limit analyses and parameter studies built on the solvers: Lane–Emden
//! zeros, convergence of the scaled system to its Newtonian limit, boundary
//! exponent fits, regime sweeps and small-Λ perturbations.

use crate::eos::EosSpec;
use crate::integrate::{integrate_adaptive, DenseSolution, Direction, EventSpec, StepControl, Status};
use crate::model::{solve_scaled, solve_star, ModelError, ModelInput, ModelOutcome, ScaledClass, SolutionProfile, SolveOptions};
use crate::odecore::{rhs_lane_emden, rhs_scaled, scaled_germ_curvature};
use crate::units::Constants;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::convert::Infallible;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid analysis input: {0}")]
    InvalidInput(String),
    #[error("U still decreasing at the cap R = {r_cap} (U = {u}); raise the cap")]
    Unterminated { r_cap: f64, u: f64 },
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("fit window holds {found} samples, need at least {needed}")]
    SparseWindow { found: usize, needed: usize },
    #[error("fit basis is rank deficient")]
    RankDeficient,
}

/// Tolerances used for reference (Lane–Emden) integrations.
pub fn reference_ctrl() -> StepControl {
    StepControl {
        h_init: 1e-6,
        ..StepControl::default().with_tolerances(1e-12, 1e-14)
    }
}

/// Germ of the Lane–Emden(–de Sitter) system, `(M, U) = (R³/3, 1 − (1 − λ)R²/6)`.
pub fn lane_emden_germ(lambda: f64, r: f64) -> [f64; 2] {
    [r * r * r / 3.0, 1.0 - (1.0 - lambda) * r * r / 6.0]
}

const LE_SURFACE: usize = 0;
const LE_MINIMUM: usize = 1;

fn lane_emden_run(mu: f64, lambda: f64, r_cap: f64, ctrl: &StepControl, stop_at_zero: bool) -> Result<DenseSolution<2>, AnalysisError> {
    if !(mu > 0.0) || !(lambda >= 0.0) {
        return Err(AnalysisError::InvalidInput(format!("need mu > 0 and lambda >= 0, got ({mu}, {lambda})")));
    }
    let r0 = SolveOptions::default().germ_radius;
    let events = [
        EventSpec::new("surface", |_, y: &[f64; 2]| y[1])
            .direction(Direction::Falling)
            .terminal(stop_at_zero),
        EventSpec::new("minimum", move |r, y: &[f64; 2]| rhs_lane_emden(r, y, mu, lambda)[1]).direction(Direction::Rising),
    ];
    integrate_adaptive(
        |r, y: &[f64; 2]| Ok::<_, Infallible>(rhs_lane_emden(r, y, mu, lambda)),
        lane_emden_germ(lambda, r0),
        (r0, r_cap),
        ctrl,
        &events,
    )
    .map_err(|f| AnalysisError::Integration(f.error.to_string()))
}

/// Dense Lane–Emden(–de Sitter) solution on `[germ radius, r_max]`, not
/// stopped at the first zero.
pub fn lane_emden_solution(mu: f64, lambda: f64, r_max: f64) -> Result<DenseSolution<2>, AnalysisError> {
    lane_emden_run(mu, lambda, r_max, &reference_ctrl(), false)
}

/// First zero `ξ₁` of the Lane–Emden(–de Sitter) function, or `None` when
/// `U` turns upward while still positive.
pub fn lane_emden_first_zero(mu: f64, lambda: f64) -> Result<Option<f64>, AnalysisError> {
    lane_emden_first_zero_capped(mu, lambda, 1e4)
}

pub fn lane_emden_first_zero_capped(mu: f64, lambda: f64, r_cap: f64) -> Result<Option<f64>, AnalysisError> {
    let sol = lane_emden_run(mu, lambda, r_cap, &reference_ctrl(), true)?;
    if sol.status() == (Status::Terminated { event: LE_SURFACE }) {
        return Ok(Some(sol.x_end()));
    }
    if sol.first_event(LE_MINIMUM).is_some() || lambda >= 1.0 {
        return Ok(None);
    }
    Err(AnalysisError::Unterminated {
        r_cap,
        u: sol.y_end()[1],
    })
}

/// `Û = λ + (1 − λ) sin R / R` and its derivative: the `μ = 1` solution.
pub fn mu1_analytic(lambda: f64, r: f64) -> (f64, f64) {
    let (sinc, dsinc) = if r.abs() < 1e-3 {
        let r2 = r * r;
        (1.0 - r2 / 6.0 + r2 * r2 / 120.0, r * (-1.0 / 3.0 + r2 / 30.0))
    } else {
        let (s, c) = r.sin_cos();
        (s / r, (c - s / r) / r)
    };
    (lambda + (1.0 - lambda) * sinc, (1.0 - lambda) * dsinc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub alpha: f64,
    pub beta: f64,
    pub outcome: String,
    #[serde(rename = "R_plus")]
    pub r_plus: Option<f64>,
    /// `sup |U − Ū|` on the common part of `[R₀, ξ₁]`.
    pub sup_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub gamma: f64,
    pub xi1: f64,
    pub rows: Vec<ConvergenceRow>,
}

const DISTANCE_SAMPLES: usize = 400;

/// `max` that keeps NaN, so failed evaluations are not hidden in sup-norms.
pub(crate) fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Distance of scaled solutions to the Lane–Emden solution for paired
/// `(α, β)` sequences.
pub fn scaled_limit_convergence(gamma: f64, alphas: &[f64], betas: &[f64]) -> Result<ConvergenceTable, AnalysisError> {
    if alphas.len() != betas.len() {
        return Err(AnalysisError::InvalidInput("alpha and beta sequences differ in length".into()));
    }
    let eos = EosSpec::polytrope(1.0, gamma, 1.0).map_err(ModelError::from)?;
    let mu = eos.mu();
    let opts = SolveOptions::default();
    let ctrl = reference_ctrl();
    let reference = lane_emden_run(mu, 0.0, 1e4, &ctrl, true)?;
    let xi1 = reference.x_end();
    let rows = alphas
        .par_iter()
        .zip(betas.par_iter())
        .map(|(&alpha, &beta)| {
            let run = solve_scaled(alpha, beta, &eos, 10.0 * xi1, &ctrl, &opts).map_err(|(e, _)| e)?;
            let end = run.solution.x_end().min(xi1);
            let r0 = run.solution.x_start();
            let sup = (0..=DISTANCE_SAMPLES)
                .map(|i| {
                    let r = r0 + (end - r0) * i as f64 / DISTANCE_SAMPLES as f64;
                    let a = run.solution.eval(r).map_or(f64::NAN, |y| y[1]);
                    let b = reference.eval(r).map_or(f64::NAN, |y| y[1]);
                    (a - b).abs()
                })
                .fold(0.0, nan_max);
            let r_plus = match run.class {
                ScaledClass::MonotoneShort { r_plus, .. } => Some(r_plus),
                _ => None,
            };
            Ok(ConvergenceRow {
                alpha,
                beta,
                outcome: run.class.tag().into(),
                r_plus,
                sup_distance: sup,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(ConvergenceTable { gamma, xi1, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// `(r₊ − r)` window relative to `r₊`.
    pub window: (f64, f64),
    pub samples: usize,
    pub exponent: f64,
    pub exponent_target: f64,
    pub exponent_rel_err: f64,
    /// `exp(intercept)` of the free log–log fit.
    pub amplitude: f64,
    /// Amplitude with the exponent fixed at its target.
    pub amplitude_fixed_exponent: f64,
    pub amplitude_target: f64,
    pub amplitude_rel_err: f64,
    pub log_residual_rms: f64,
    /// Exponents of the basis fitted to `u/(B(r₊ − r)) − 1`.
    pub correction_exponents: [f64; 2],
    pub correction_coeffs: [f64; 2],
    pub correction_residual_rms: f64,
    /// `d²u/dr²(r₊)/(2B)`, the expected first correction coefficient.
    pub correction_linear_target: f64,
}

pub const FIT_WINDOW: (f64, f64) = (1e-6, 1e-2);
pub const FIT_MIN_SAMPLES: usize = 50;

/// Fits `ρ ≈ C (r₊ − r)^p` near the vacuum boundary of a monotone-short
/// profile, plus the correction structure of `u`.
pub fn boundary_exponent_fit(profile: &SolutionProfile) -> Result<ExponentFit, AnalysisError> {
    boundary_exponent_fit_window(profile, FIT_WINDOW)
}

pub fn boundary_exponent_fit_window(profile: &SolutionProfile, window: (f64, f64)) -> Result<ExponentFit, AnalysisError> {
    let bq = crate::model::boundary_quantities(profile)?;
    let eos = &profile.eos;
    let (rp, b) = (bq.r_plus, bq.b);
    let pts: Vec<(f64, f64, f64)> = profile
        .samples
        .iter()
        .filter_map(|s| {
            let x = rp - s.r;
            (x >= window.0 * rp && x <= window.1 * rp && s.rho > 0.0).then_some((x, s.rho, s.u))
        })
        .collect();
    if pts.len() < FIT_MIN_SAMPLES {
        return Err(AnalysisError::SparseWindow {
            found: pts.len(),
            needed: FIT_MIN_SAMPLES,
        });
    }
    let n = pts.len() as f64;
    let mu = eos.mu();

    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(AnalysisError::RankDeficient);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let log_residual_rms =
        (lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    let fixed_intercept = ly.iter().zip(&lx).map(|(y, x)| y - mu * x).sum::<f64>() / n;
    let amplitude_target = ((eos.gamma() - 1.0) * b / (eos.gamma() * eos.a())).powf(mu);
    let amplitude = intercept.exp();

    // u/(Bx) − 1 ≈ c₁x + c₂x^{μ+1}
    let basis = [1.0, mu + 1.0];
    let rows: Vec<([f64; 2], f64)> = pts
        .iter()
        .map(|&(x, _, u)| ([x.powf(basis[0]), x.powf(basis[1])], u / (b * x) - 1.0))
        .collect();
    let mut ata = [[0.0; 2]; 2];
    let mut atb = [0.0; 2];
    for (phi, y) in &rows {
        for i in 0..2 {
            atb[i] += phi[i] * y;
            for j in 0..2 {
                ata[i][j] += phi[i] * phi[j];
            }
        }
    }
    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    if !(det.abs() > 1e-14 * ata[0][0] * ata[1][1]) {
        return Err(AnalysisError::RankDeficient);
    }
    let c1 = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
    let c2 = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
    let correction_residual_rms =
        (rows.iter().map(|(phi, y)| (y - c1 * phi[0] - c2 * phi[1]).powi(2)).sum::<f64>() / n).sqrt();
    let d2u = crate::model::d2u_at_boundary(&bq, profile.lambda, &profile.constants);

    Ok(ExponentFit {
        window,
        samples: pts.len(),
        exponent: slope,
        exponent_target: mu,
        exponent_rel_err: (slope - mu).abs() / mu,
        amplitude,
        amplitude_fixed_exponent: fixed_intercept.exp(),
        amplitude_target,
        amplitude_rel_err: (amplitude - amplitude_target).abs() / amplitude_target,
        log_residual_rms,
        correction_exponents: basis,
        correction_coeffs: [c1, c2],
        correction_residual_rms,
        correction_linear_target: d2u / (2.0 * b),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    pub outcome: String,
    #[serde(rename = "R_plus")]
    pub r_plus: Option<f64>,
    /// `min(−dU/dR)` over the accepted steps.
    pub min_neg_slope: Option<f64>,
    /// `dU/dR ≥ 0` already at the germ radius.
    pub initially_rising: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub gamma: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Row-major over `alphas × betas`.
    pub cells: Vec<SweepCell>,
    /// Largest `ε` from the grids with every cell of `[0, ε]²` monotone-short.
    pub epsilon0_estimate: Option<f64>,
}

impl SweepResult {
    pub fn cell(&self, i_alpha: usize, i_beta: usize) -> &SweepCell {
        &self.cells[i_alpha * self.betas.len() + i_beta]
    }
}

fn sweep_cell(alpha: f64, beta: f64, eos: &EosSpec, ctrl: &StepControl, opts: &SolveOptions) -> SweepCell {
    let initially_rising = scaled_germ_curvature(alpha, beta, eos).map_or(false, |c| c <= 0.0);
    match solve_scaled(alpha, beta, eos, opts.r_max_scaled, ctrl, opts) {
        Ok(run) => {
            let min_neg_slope = run
                .solution
                .knots()
                .iter()
                .filter_map(|(r, y)| rhs_scaled(*r, y, alpha, beta, eos).ok().map(|d| -d[1]))
                .reduce(f64::min);
            let r_plus = match run.class {
                ScaledClass::MonotoneShort { r_plus, .. } => Some(r_plus),
                _ => None,
            };
            SweepCell {
                alpha,
                beta,
                outcome: run.class.tag().into(),
                r_plus,
                min_neg_slope,
                initially_rising,
                error: None,
            }
        }
        Err((e, _)) => SweepCell {
            alpha,
            beta,
            outcome: "Error".into(),
            r_plus: None,
            min_neg_slope: None,
            initially_rising,
            error: Some(e.to_string()),
        },
    }
}

/// Outcome map of the scaled system over `alphas × betas`; cells are solved
/// in parallel and assembled in grid order.
pub fn regime_sweep(
    eos: &EosSpec,
    alphas: &[f64],
    betas: &[f64],
    ctrl: &StepControl,
    opts: &SolveOptions,
) -> Result<SweepResult, AnalysisError> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(AnalysisError::InvalidInput("empty sweep grid".into()));
    }
    if alphas.iter().chain(betas).any(|v| !(0.0..=1.0).contains(v)) {
        return Err(AnalysisError::InvalidInput("sweep grids must lie in [0, 1]".into()));
    }
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    let cells: Vec<SweepCell> = pairs.par_iter().map(|&(a, b)| sweep_cell(a, b, eos, ctrl, opts)).collect();
    let mut eps: Vec<f64> = alphas.iter().chain(betas).copied().collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let mut estimate = None;
    for e in eps {
        let mut inside = cells.iter().filter(|c| c.alpha <= e && c.beta <= e).peekable();
        if inside.peek().is_none() {
            continue;
        }
        if inside.all(|c| c.outcome == "MonotoneShort") {
            estimate = Some(e);
        } else {
            break;
        }
    }
    Ok(SweepResult {
        gamma: eos.gamma(),
        alphas: alphas.to_vec(),
        betas: betas.to_vec(),
        cells,
        epsilon0_estimate: estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRow {
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub outcome: String,
    pub r_plus: Option<f64>,
    /// `|r₊(Λ) − r₊(0)| / r₊(0)`
    pub radius_shift: Option<f64>,
}

/// Solves the model at `ρ_c` for `Λ = 0` and each listed `Λ`, reporting the
/// relative shift of the vacuum boundary.
pub fn perturbation_compare(
    rho_c: f64,
    eos: &EosSpec,
    constants: Constants,
    lambdas: &[f64],
) -> Result<Vec<PerturbationRow>, AnalysisError> {
    let solve = |lambda: f64| solve_star(&ModelInput::from_density(rho_c, lambda, eos.clone(), constants));
    let (_, base) = solve(0.0)?;
    let ModelOutcome::MonotoneShort(base_bq) = base else {
        return Err(AnalysisError::InvalidInput(format!(
            "the Lambda = 0 model at rho_c = {rho_c} is {}, not monotone-short",
            base.tag()
        )));
    };
    let mut rows = vec![PerturbationRow {
        lambda: 0.0,
        outcome: base.tag().into(),
        r_plus: Some(base_bq.r_plus),
        radius_shift: Some(0.0),
    }];
    let solved: Vec<_> = lambdas.par_iter().map(|&l| (l, solve(l))).collect();
    for (lambda, res) in solved {
        let row = match res {
            Ok((_, ModelOutcome::MonotoneShort(bq))) => PerturbationRow {
                lambda,
                outcome: "MonotoneShort".into(),
                r_plus: Some(bq.r_plus),
                radius_shift: Some((bq.r_plus - base_bq.r_plus).abs() / base_bq.r_plus),
            },
            Ok((_, other)) => PerturbationRow {
                lambda,
                outcome: other.tag().into(),
                r_plus: None,
                radius_shift: None,
            },
            Err(e) => PerturbationRow {
                lambda,
                outcome: format!("Error: {e}"),
                r_plus: None,
                radius_shift: None,
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonMonotoneCell {
    pub gamma: f64,
    /// `c²Λ/(4πGA₁)` with the central enthalpy as unit.
    pub lambda: f64,
    pub c: f64,
    pub outcome: String,
    /// Scaled radius of the first pressure increase.
    pub r_turn: Option<f64>,
    pub initially_rising: bool,
}

/// Scans `(γ, λ, c)` with the central enthalpy as unit (`α = 1/c²`,
/// `β = λ`) and returns every cell, in scan order, plus the first
/// non-monotone one.
pub fn nonmonotone_search(
    gammas: &[f64],
    lambdas: &[f64],
    cs: &[f64],
    r_max: f64,
) -> Result<(Vec<NonMonotoneCell>, Option<NonMonotoneCell>), AnalysisError> {
    let ctrl = StepControl::default();
    let opts = SolveOptions::default();
    let mut grid = Vec::new();
    for &g in gammas {
        for &l in lambdas {
            for &c in cs {
                grid.push((g, l, c));
            }
        }
    }
    let cells = grid
        .par_iter()
        .map(|&(gamma, lambda, c)| {
            let eos = EosSpec::polytrope(1.0, gamma, c).map_err(ModelError::from)?;
            let alpha = 1.0 / (c * c);
            let initially_rising = scaled_germ_curvature(alpha, lambda, &eos).map_err(ModelError::from)? <= 0.0;
            let (outcome, r_turn) = match solve_scaled(alpha, lambda, &eos, r_max, &ctrl, &opts) {
                Ok(run) => match run.class {
                    ScaledClass::NonMonotone { r } => ("NonMonotone".to_string(), Some(r)),
                    other => (other.tag().to_string(), None),
                },
                Err((e, _)) => (format!("Error: {e}"), None),
            };
            Ok(NonMonotoneCell {
                gamma,
                lambda,
                c,
                outcome,
                r_turn,
                initially_rising,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let first = cells.iter().find(|c| c.outcome == "NonMonotone" && !c.initially_rising).cloned();
    Ok((cells, first))
}

/// Largest ratio `‖(M, U)(R₀; p) − (M, U)(R₀; q)‖ / ‖p − q‖` over neighbouring
/// points `p, q` of an `(α, β)` grid: an empirical Lipschitz constant of the
/// solution at fixed radius.
pub fn parameter_lipschitz(eos: &EosSpec, grid: &[f64], r0: f64) -> Result<f64, AnalysisError> {
    let ctrl = reference_ctrl();
    let opts = SolveOptions {
        enforce_u_ceiling: false,
        ..SolveOptions::default()
    };
    let n = grid.len();
    let states: Vec<[f64; 2]> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (grid[k / n], grid[k % n]);
            let run = solve_scaled(a, b, eos, r0, &ctrl, &opts).map_err(|(e, _)| e)?;
            run.solution
                .eval(r0)
                .ok_or_else(|| AnalysisError::Integration(format!("solution for ({a}, {b}) ends before R0 = {r0}")))
        })
        .collect::<Result<_, AnalysisError>>()?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let here = states[i * n + j];
            for (di, dj) in [(1, 0), (0, 1)] {
                let (ii, jj) = (i + di, j + dj);
                if ii >= n || jj >= n {
                    continue;
                }
                let there = states[ii * n + jj];
                let dp = ((grid[ii] - grid[i]).powi(2) + (grid[jj] - grid[j]).powi(2)).sqrt();
                let dy = ((there[0] - here[0]).powi(2) + (there[1] - here[1]).powi(2)).sqrt();
                if dp > 0.0 {
                    worst = worst.max(dy / dp);
                }
            }
        }
    }
    Ok(worst)
}
