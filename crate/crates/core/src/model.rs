//! Stellar models: prolongation of the center germ, outcome classification
//! and boundary quantities.
//!
//! Models are integrated in the homologous variables `(R, M, U)` and mapped
//! back to `(r, m, u)` through [`ScalingParams`]; the two systems are
//! equivalent under the change of variables.

use crate::eos::{EosError, EosSpec};
use crate::integrate::{integrate_adaptive, DenseSolution, Direction, EventSpec, StepControl, Status};
use crate::odecore::{
    center_germ_scaled, kappa, kappa_scaled, q_function, rhs_scaled, rhs_tovds_enthalpy, scaled_germ_curvature,
    OdeError, ScalingParams,
};
use crate::units::Constants;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

const EV_SURFACE: usize = 0;
const EV_HORIZON: usize = 1;
const EV_PRESSURE_TURN: usize = 2;
const EV_CEILING: usize = 3;
const EVENT_NAMES: [&str; 4] = ["surface", "horizon", "pressure_turn", "u_ceiling"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("integration stopped at r = {r}: {message}")]
    Integration {
        message: String,
        r: f64,
        partial: Option<Box<SolutionProfile>>,
    },
    #[error("scaled enthalpy reached the ceiling U = 2 at R = {r}; set enforce_u_ceiling = false to continue past it")]
    Ceiling { r: f64 },
    #[error("boundary quantities need a profile terminated at the vacuum boundary")]
    NotTerminated,
    #[error("gamma = {0} outside (6/5, 2)")]
    GammaOutOfRange(f64),
}

/// Solver knobs that are not integration tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    /// Scaled radius where the germ is handed to the integrator.
    pub germ_radius: f64,
    pub kappa_min: f64,
    /// Relative size of the balance `M + (pressure term) − βR³/3`, compared
    /// with its largest term, above which `dP/dr` counts as non-negative.
    pub monotonicity_tol: f64,
    pub surface_root_tol: f64,
    pub enforce_u_ceiling: bool,
    /// Extra samples placed on a log grid just inside the surface.
    pub boundary_samples: usize,
    /// Scaled prolongation cap used when the input gives no `r_max`.
    pub r_max_scaled: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            germ_radius: 1e-6,
            kappa_min: 1e-10,
            monotonicity_tol: 1e-8,
            surface_root_tol: 1e-12,
            enforce_u_ceiling: true,
            boundary_samples: 200,
            r_max_scaled: 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    Density(f64),
    Enthalpy(f64),
}

#[derive(Debug, Clone)]
pub struct ModelInput {
    pub center: Center,
    pub lambda: f64,
    pub eos: EosSpec,
    pub constants: Constants,
    /// Physical prolongation cap; `None` uses `options.r_max_scaled`.
    pub r_max: Option<f64>,
    pub ctrl: StepControl,
    pub options: SolveOptions,
}

impl ModelInput {
    pub fn from_density(rho_c: f64, lambda: f64, eos: EosSpec, constants: Constants) -> Self {
        ModelInput {
            center: Center::Density(rho_c),
            lambda,
            eos,
            constants,
            r_max: None,
            ctrl: StepControl::default(),
            options: SolveOptions::default(),
        }
    }

    pub fn from_enthalpy(u_c: f64, lambda: f64, eos: EosSpec, constants: Constants) -> Self {
        ModelInput {
            center: Center::Enthalpy(u_c),
            ..ModelInput::from_density(1.0, lambda, eos, constants)
        }
    }

    /// Input whose homologous parameters are `(α, β)`.
    pub fn from_scaled(alpha: f64, beta: f64, eos: EosSpec, constants: Constants) -> Result<Self, ModelError> {
        let s = ScalingParams::from_scaled(alpha, beta, &eos, &constants)?;
        Ok(ModelInput::from_enthalpy(s.b, s.cosmological_constant, eos, constants))
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = Some(r_max);
        self
    }

    pub fn with_ctrl(mut self, ctrl: StepControl) -> Self {
        self.ctrl = ctrl;
        self
    }

    pub fn with_options(mut self, options: SolveOptions) -> Self {
        self.options = options;
        self
    }

    /// `(ρ_c, u_c)`
    pub fn central_values(&self) -> Result<(f64, f64), ModelError> {
        match self.center {
            Center::Density(rho) if rho > 0.0 && rho.is_finite() => Ok((rho, self.eos.u_of_density(rho)?)),
            Center::Enthalpy(u) if u > 0.0 && u.is_finite() => Ok((self.eos.density_of_u(u)?, u)),
            other => Err(ModelError::InvalidInput(format!("central value must be positive, got {other:?}"))),
        }
    }

    pub fn scaling(&self) -> Result<ScalingParams, ModelError> {
        let (_, u_c) = self.central_values()?;
        Ok(ScalingParams::new(u_c, self.lambda, &self.eos, &self.constants)?)
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(ModelError::InvalidInput(format!("Lambda must be >= 0, got {}", self.lambda)));
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0) {
                return Err(ModelError::InvalidInput(format!("r_max must be positive, got {r}")));
            }
        }
        self.ctrl.validate().map_err(ModelError::InvalidInput)?;
        let o = &self.options;
        if !(o.germ_radius > 0.0 && o.germ_radius < 1e-2) {
            return Err(ModelError::InvalidInput(format!(
                "germ radius must lie in (0, 1e-2), got {}",
                o.germ_radius
            )));
        }
        if !(o.kappa_min > 0.0 && o.kappa_min < 1.0) {
            return Err(ModelError::InvalidInput(format!("kappa_min must lie in (0, 1), got {}", o.kappa_min)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryQuantities {
    pub r_plus: f64,
    pub m_plus: f64,
    pub kappa_plus: f64,
    #[serde(rename = "Q_plus")]
    pub q_plus: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// `dκ/dr` at `r₊ − 0`
    pub kappa_plus_prime: f64,
}

impl BoundaryQuantities {
    pub fn new(r_plus: f64, m_plus: f64, lambda: f64, k: &Constants) -> Self {
        let kappa_plus = kappa(r_plus, m_plus, lambda, k);
        let q_plus = q_function(r_plus, m_plus, 0.0, lambda, k);
        BoundaryQuantities {
            r_plus,
            m_plus,
            kappa_plus,
            q_plus,
            b: q_plus / (r_plus * r_plus * kappa_plus),
            // dm/dr vanishes at the surface
            kappa_plus_prime: 2.0 * k.g * m_plus / (k.c2() * r_plus * r_plus) - 2.0 * lambda * r_plus / 3.0,
        }
    }
}

/// `d²u/dr²` at `r₊ − 0`.
pub fn d2u_at_boundary(bq: &BoundaryQuantities, lambda: f64, k: &Constants) -> f64 {
    let (r, kp, q) = (bq.r_plus, bq.kappa_plus, bq.q_plus);
    k.c2() * lambda / kp + 2.0 * q / (r.powi(3) * kp) + 2.0 * q * q / (k.c2() * r.powi(4) * kp * kp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum ModelOutcome {
    MonotoneShort(BoundaryQuantities),
    /// First radius where `dP/dr ≥ 0`.
    NonMonotone { r: f64 },
    /// `κ` fell to the guard value; `u` tells whether the matter ran out at
    /// the same place.
    HorizonDegenerate {
        r: f64,
        kappa: f64,
        u: f64,
        #[serde(rename = "Q")]
        q: f64,
    },
    Unterminated { r_max: f64, u: f64 },
}

impl ModelOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelOutcome::MonotoneShort(_) => "MonotoneShort",
            ModelOutcome::NonMonotone { .. } => "NonMonotone",
            ModelOutcome::HorizonDegenerate { .. } => "HorizonDegenerate",
            ModelOutcome::Unterminated { .. } => "Unterminated",
        }
    }

    pub fn is_monotone_short(&self) -> bool {
        matches!(self, ModelOutcome::MonotoneShort(_))
    }
}

/// Outcome in scaled units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaledClass {
    MonotoneShort { r_plus: f64, m_plus: f64 },
    NonMonotone { r: f64 },
    HorizonDegenerate { r: f64 },
    Unterminated { r: f64 },
}

impl ScaledClass {
    pub fn tag(&self) -> &'static str {
        match self {
            ScaledClass::MonotoneShort { .. } => "MonotoneShort",
            ScaledClass::NonMonotone { .. } => "NonMonotone",
            ScaledClass::HorizonDegenerate { .. } => "HorizonDegenerate",
            ScaledClass::Unterminated { .. } => "Unterminated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLogEntry {
    pub name: String,
    pub r: f64,
    pub m: f64,
    pub u: f64,
}

/// A prolonged germ of the scaled system.
#[derive(Debug, Clone)]
pub struct ScaledRun {
    pub alpha: f64,
    pub beta: f64,
    pub solution: DenseSolution<2>,
    pub class: ScaledClass,
    /// `dU/dR` at the germ radius.
    pub initial_slope: f64,
    /// Germ curvature vanishes: the constant-pressure special case.
    pub constant_pressure: bool,
    pub germ_radius: f64,
}

impl ScaledRun {
    pub fn events(&self) -> Vec<EventLogEntry> {
        let mut out = Vec::new();
        if self.initial_slope > 0.0 && !self.constant_pressure {
            let y = self.solution.y_start();
            out.push(EventLogEntry {
                name: "pressure_increasing_at_center".into(),
                r: self.germ_radius,
                m: y[0],
                u: y[1],
            });
        }
        for e in self.solution.events() {
            out.push(EventLogEntry {
                name: EVENT_NAMES[e.event].into(),
                r: e.x,
                m: e.y[0],
                u: e.y[1],
            });
        }
        out
    }

    /// Scaled state; the germ is used inside the germ radius.
    pub fn state_at(&self, eos: &EosSpec, r: f64) -> Option<[f64; 2]> {
        if r > 0.0 && r < self.germ_radius {
            let (m, u) = center_germ_scaled(self.alpha, self.beta, eos, r).ok()?;
            return Some([m, u]);
        }
        self.solution.eval(r)
    }
}

/// Prolongs the scaled germ for given `(α, β)` up to `r_max` (scaled).
pub fn solve_scaled(
    alpha: f64,
    beta: f64,
    eos: &EosSpec,
    r_max: f64,
    ctrl: &StepControl,
    opts: &SolveOptions,
) -> Result<ScaledRun, (ModelError, Option<DenseSolution<2>>)> {
    if !(alpha >= 0.0) || !(beta >= 0.0) {
        return Err((
            ModelError::InvalidInput(format!("alpha and beta must be non-negative, got ({alpha}, {beta})")),
            None,
        ));
    }
    let r0 = opts.germ_radius;
    if !(r_max > r0) {
        return Err((ModelError::InvalidInput(format!("r_max = {r_max} inside the germ radius")), None));
    }
    let (m0, u0) = center_germ_scaled(alpha, beta, eos, r0).map_err(|e| (e.into(), None))?;
    let curvature = scaled_germ_curvature(alpha, beta, eos).map_err(|e| (e.into(), None))?;
    let constant_pressure = curvature.abs() <= 1e-12;
    let rhs = |r: f64, y: &[f64; 2]| rhs_scaled(r, y, alpha, beta, eos);
    let initial_slope = rhs(r0, &[m0, u0]).map_err(|e| (e.into(), None))?[1];
    let tol = opts.monotonicity_tol;
    let turn_guard = move |r: f64, y: &[f64; 2]| pressure_turn_guard(r, y, alpha, beta, eos, tol);
    let initially_rising = turn_guard(r0, &[m0, u0]) > 0.0;
    let kmin = opts.kappa_min;
    let mut events = vec![
        EventSpec::new(EVENT_NAMES[EV_SURFACE], |_, y: &[f64; 2]| y[1])
            .direction(Direction::Falling)
            .terminal(true)
            .root_tol(opts.surface_root_tol),
        EventSpec::new(EVENT_NAMES[EV_HORIZON], move |r, y: &[f64; 2]| {
            kappa_scaled(r, y[0], alpha, beta) - kmin
        })
        .direction(Direction::Falling)
        .terminal(true),
        EventSpec::new(EVENT_NAMES[EV_PRESSURE_TURN], turn_guard).direction(Direction::Rising),
    ];
    if opts.enforce_u_ceiling {
        events.push(
            EventSpec::new(EVENT_NAMES[EV_CEILING], |_, y: &[f64; 2]| 2.0 - y[1])
                .direction(Direction::Falling)
                .terminal(true),
        );
    }
    let ctrl = StepControl {
        h_init: ctrl.h_init.min(r0),
        ..*ctrl
    };
    let sol = integrate_adaptive(rhs, [m0, u0], (r0, r_max), &ctrl, &events).map_err(|f| {
        let r = f.partial.x_end();
        (
            ModelError::Integration {
                message: f.error.to_string(),
                r,
                partial: None,
            },
            Some(f.partial),
        )
    })?;

    let nonmonotone = if initially_rising {
        Some(r0)
    } else {
        sol.first_event(EV_PRESSURE_TURN).map(|e| e.x)
    };
    let class = match (sol.status(), nonmonotone) {
        (_, Some(r)) => ScaledClass::NonMonotone { r },
        (Status::Terminated { event: EV_HORIZON }, None) => ScaledClass::HorizonDegenerate { r: sol.x_end() },
        (Status::Terminated { event: EV_SURFACE }, None) => {
            let [m_plus, _] = sol.y_end();
            let r_plus = sol.x_end();
            let k_plus = kappa_scaled(r_plus, m_plus, alpha, beta);
            let q_plus = m_plus - beta * r_plus.powi(3) / 3.0;
            if k_plus > 0.0 && q_plus > 0.0 {
                ScaledClass::MonotoneShort { r_plus, m_plus }
            } else {
                ScaledClass::NonMonotone { r: r_plus }
            }
        }
        (Status::Terminated { .. }, None) => {
            return Err((ModelError::Ceiling { r: sol.x_end() }, Some(sol)));
        }
        _ => ScaledClass::Unterminated { r: sol.x_end() },
    };
    Ok(ScaledRun {
        alpha,
        beta,
        solution: sol,
        class,
        initial_slope,
        constant_pressure,
        germ_radius: r0,
    })
}

/// Positive when `dU/dR > 0` by more than `tol` relative to the terms of the
/// numerator; the balance is exact only in the constant-pressure case, where
/// integration noise must not count as a turn.
fn pressure_turn_guard(r: f64, y: &[f64; 2], alpha: f64, beta: f64, eos: &EosSpec, tol: f64) -> f64 {
    let [m, u] = *y;
    let mu = eos.mu();
    let o_p = if u > 0.0 {
        match eos.omega_rho_p(alpha * u) {
            Ok((_, o)) => o,
            Err(_) => return f64::NAN,
        }
    } else {
        1.0
    };
    let r3 = r * r * r;
    let pressure = alpha * r3 * crate::odecore::pos_pow(u, mu + 1.0) * o_p / (mu + 1.0);
    let vacuum = beta * r3 / 3.0;
    let scale = m.abs().max(pressure).max(vacuum);
    -(m + pressure - vacuum) - tol * scale
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    pub m: f64,
    pub u: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub rho: f64,
    pub kappa: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "dPdr")]
    pub dpdr: f64,
}

/// Physical profile of a solved model.
#[derive(Debug, Clone)]
pub struct SolutionProfile {
    pub samples: Vec<ProfileSample>,
    pub events: Vec<EventLogEntry>,
    pub scaling: ScalingParams,
    pub lambda: f64,
    pub constants: Constants,
    pub eos: EosSpec,
    pub rho_c: f64,
    pub u_c: f64,
    /// Germ curvature vanishes (constant pressure, Einstein's static case).
    pub constant_pressure: bool,
    run: ScaledRun,
}

impl PartialEq for SolutionProfile {
    fn eq(&self, other: &Self) -> bool {
        self.samples == other.samples && self.events == other.events
    }
}

impl SolutionProfile {
    fn build(run: ScaledRun, s: ScalingParams, input: &ModelInput, rho_c: f64, opts: &SolveOptions) -> Self {
        let mut radii: Vec<f64> = run.solution.knots().iter().map(|(x, _)| *x).collect();
        let (x0, x1) = (run.solution.x_start(), run.solution.x_end());
        const UNIFORM: usize = 100;
        radii.extend((1..UNIFORM).map(|i| x0 + (x1 - x0) * i as f64 / UNIFORM as f64));
        if matches!(run.class, ScaledClass::MonotoneShort { .. }) && opts.boundary_samples > 1 {
            let n = opts.boundary_samples;
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                let x = x1 * 10f64.powf(-8.0 + 7.0 * t);
                radii.push(x1 - x);
            }
        }
        radii.retain(|r| *r >= x0 && *r <= x1);
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let mut profile = SolutionProfile {
            samples: Vec::with_capacity(radii.len()),
            events: Vec::new(),
            scaling: s,
            lambda: input.lambda,
            constants: input.constants,
            eos: input.eos.clone(),
            rho_c,
            u_c: s.b,
            constant_pressure: run.constant_pressure,
            run,
        };
        profile.samples = radii.iter().filter_map(|&rs| profile.sample_scaled(rs)).collect();
        profile.events = profile
            .run
            .events()
            .into_iter()
            .map(|e| {
                let (r, y) = s.to_physical(e.r, &[e.m, e.u]);
                EventLogEntry {
                    name: e.name,
                    r,
                    m: y[0],
                    u: y[1],
                }
            })
            .collect();
        profile
    }

    fn sample_scaled(&self, rs: f64) -> Option<ProfileSample> {
        let ys = self.run.state_at(&self.eos, rs)?;
        let (r, y) = self.scaling.to_physical(rs, &ys);
        self.sample_from_state(r, y)
    }

    fn sample_from_state(&self, r: f64, y: [f64; 2]) -> Option<ProfileSample> {
        let k = &self.constants;
        let [m, u] = y;
        let (rho, p) = self.eos.density_pressure_of_u(u).ok()?;
        let du = rhs_tovds_enthalpy(r, &y, self.lambda, &self.eos, k).ok()?[1];
        Some(ProfileSample {
            r,
            m,
            u,
            p,
            rho,
            kappa: kappa(r, m, self.lambda, k),
            q: q_function(r, m, p, self.lambda, k),
            dpdr: (rho + p / k.c2()) * du,
        })
    }

    /// Physical `(m, u)` at radius `r`, from the dense solution (the germ
    /// inside the germ radius).
    pub fn state_at(&self, r: f64) -> Option<[f64; 2]> {
        let end = self.run.solution.x_end();
        let mut rs = r / self.scaling.a;
        // r₊ mapped back to scaled units may overshoot the end by an ulp
        if rs > end && rs - end <= 4.0 * f64::EPSILON * end {
            rs = end;
        }
        let ys = self.run.state_at(&self.eos, rs)?;
        Some(self.scaling.to_physical(rs, &ys).1)
    }

    /// Full sample at an arbitrary radius.
    pub fn sample_at(&self, r: f64) -> Option<ProfileSample> {
        self.sample_from_state(r, self.state_at(r)?)
    }

    pub fn r_start(&self) -> f64 {
        self.scaling.a * self.run.germ_radius
    }

    pub fn r_end(&self) -> f64 {
        self.scaling.a * self.run.solution.x_end()
    }

    /// Physical `(m, u)` at the last integrated point.
    pub fn end_state(&self) -> [f64; 2] {
        self.scaling.to_physical(self.run.solution.x_end(), &self.run.solution.y_end()).1
    }

    pub fn scaled_run(&self) -> &ScaledRun {
        &self.run
    }

    pub fn terminated_at_surface(&self) -> bool {
        self.run.solution.status() == (Status::Terminated { event: EV_SURFACE })
    }
}

/// Boundary limits of a profile that ended at the vacuum boundary.
pub fn boundary_quantities(profile: &SolutionProfile) -> Result<BoundaryQuantities, ModelError> {
    if !profile.terminated_at_surface() {
        return Err(ModelError::NotTerminated);
    }
    let [m_plus, _] = profile.end_state();
    Ok(BoundaryQuantities::new(
        profile.r_end(),
        m_plus,
        profile.lambda,
        &profile.constants,
    ))
}

fn classify_physical(profile: &SolutionProfile) -> Result<ModelOutcome, ModelError> {
    let a = profile.scaling.a;
    let k = &profile.constants;
    Ok(match profile.run.class {
        ScaledClass::MonotoneShort { .. } => ModelOutcome::MonotoneShort(boundary_quantities(profile)?),
        ScaledClass::NonMonotone { r } => ModelOutcome::NonMonotone { r: a * r },
        ScaledClass::HorizonDegenerate { .. } => {
            let r = profile.r_end();
            let [m, u] = profile.end_state();
            let p = profile.eos.pressure_of_u(u)?;
            ModelOutcome::HorizonDegenerate {
                r,
                kappa: kappa(r, m, profile.lambda, k),
                u,
                q: q_function(r, m, p, profile.lambda, k),
            }
        }
        ScaledClass::Unterminated { .. } => ModelOutcome::Unterminated {
            r_max: profile.r_end(),
            u: profile.end_state()[1],
        },
    })
}

/// Prolongs the center germ of `input` to the right and classifies it.
pub fn solve_star(input: &ModelInput) -> Result<(SolutionProfile, ModelOutcome), ModelError> {
    input.validate()?;
    let (rho_c, _) = input.central_values()?;
    input.eos.check_physical(rho_c)?;
    let s = input.scaling()?;
    let opts = input.options;
    let r_max = match input.r_max {
        Some(r) => r / s.a,
        None => opts.r_max_scaled,
    };
    match solve_scaled(s.alpha, s.beta, &input.eos, r_max, &input.ctrl, &opts) {
        Ok(run) => {
            let profile = SolutionProfile::build(run, s, input, rho_c, &opts);
            let outcome = classify_physical(&profile)?;
            Ok((profile, outcome))
        }
        Err((err, partial)) => {
            let (message, r_scaled) = match &err {
                ModelError::Integration { message, r, .. } => (message.clone(), *r),
                ModelError::Ceiling { r } => (err.to_string(), *r),
                _ => return Err(err),
            };
            let partial = partial.map(|sol| {
                let run = ScaledRun {
                    alpha: s.alpha,
                    beta: s.beta,
                    solution: sol,
                    class: ScaledClass::Unterminated { r: r_scaled },
                    initial_slope: 0.0,
                    constant_pressure: false,
                    germ_radius: opts.germ_radius,
                };
                Box::new(SolutionProfile::build(run, s, input, rho_c, &opts))
            });
            Err(ModelError::Integration {
                message,
                r: s.a * r_scaled,
                partial,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallnessCheck {
    pub alpha: f64,
    pub beta: f64,
    pub satisfied: bool,
    /// Largest `Λ` for which some `u_c` satisfies both bounds.
    pub lambda_cap: f64,
    /// `[u_min, u_max]` of central enthalpies satisfying both bounds at this `Λ`.
    pub feasible_u_c: Option<(f64, f64)>,
}

/// Evaluates the smallness conditions `u_c ≤ c²ε₀` and
/// `Λ ≤ (4πG/c²)A₁u_c^μ ε₀`, i.e. `α ≤ ε₀` and `β ≤ ε₀`.
pub fn smallness_check(
    u_c: f64,
    lambda: f64,
    eos: &EosSpec,
    k: &Constants,
    epsilon0: f64,
) -> Result<SmallnessCheck, ModelError> {
    let gamma = eos.gamma();
    if !(gamma > 1.2 && gamma < 2.0) {
        return Err(ModelError::GammaOutOfRange(gamma));
    }
    if !(epsilon0 > 0.0 && epsilon0 <= 1.0) {
        return Err(ModelError::InvalidInput(format!("epsilon0 must lie in (0, 1], got {epsilon0}")));
    }
    let s = ScalingParams::new(u_c, lambda, eos, k)?;
    let mu = eos.mu();
    let four_pi_g_a1 = 4.0 * PI * k.g * eos.a1();
    let lambda_cap = four_pi_g_a1 * epsilon0.powf(mu + 1.0) * k.c.powf(2.0 * mu - 2.0);
    let u_hi = k.c2() * epsilon0;
    let u_lo = (k.c2() * lambda / (four_pi_g_a1 * epsilon0)).powf(1.0 / mu);
    Ok(SmallnessCheck {
        alpha: s.alpha,
        beta: s.beta,
        satisfied: s.alpha <= epsilon0 && s.beta <= epsilon0,
        lambda_cap,
        feasible_u_c: (u_lo <= u_hi).then_some((u_lo, u_hi)),
    })
}

/// Exterior continuation of a `Λ = 0` model: `m = m₊`,
/// `u = (c²/2)(log(1 − 2Gm₊/(c²r₊)) − log(1 − 2Gm₊/(c²r)))`.
pub fn vacuum_continuation_lambda0(m_plus: f64, r_plus: f64, k: &Constants, r: f64) -> Result<(f64, f64), ModelError> {
    let s_plus = 2.0 * k.g * m_plus / (k.c2() * r_plus);
    if !(s_plus < 1.0) {
        return Err(ModelError::InvalidInput(format!(
            "r_+ = {r_plus} is inside the Schwarzschild radius of m_+ = {m_plus}"
        )));
    }
    if !(r >= r_plus) {
        return Err(ModelError::InvalidInput(format!("r = {r} lies inside r_+ = {r_plus}")));
    }
    let s = 2.0 * k.g * m_plus / (k.c2() * r);
    Ok((m_plus, 0.5 * k.c2() * ((-s_plus).ln_1p() - (-s).ln_1p())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odecore::rhs_tov;

    const GEO: Constants = Constants::GEOMETRIZED;

    fn poly15() -> EosSpec {
        EosSpec::polytrope(1.0, 1.5, 1.0).unwrap()
    }

    #[test]
    fn small_alpha_beta_is_monotone_short_near_lane_emden() {
        let input = ModelInput::from_scaled(1e-3, 1e-3, poly15(), GEO).unwrap();
        let (profile, outcome) = solve_star(&input).unwrap();
        let ModelOutcome::MonotoneShort(bq) = outcome else { panic!("{outcome:?}") };
        let r_scaled = bq.r_plus / profile.scaling.a;
        // first zero of the n = 2 Lane–Emden function
        assert!((r_scaled / 4.352_874_595_946 - 1.0).abs() < 0.05, "{r_scaled}");
        assert!(bq.kappa_plus > 0.0 && bq.q_plus > 0.0 && bq.b > 0.0);
        let kap = kappa(bq.r_plus, bq.m_plus, profile.lambda, &GEO);
        assert!(((kap - bq.kappa_plus) / kap).abs() < 1e-12);
        // Definition 1 on the stored samples
        for w in profile.samples.windows(2) {
            assert!(w[1].m >= w[0].m);
            assert!(w[1].r > w[0].r);
        }
        for s in &profile.samples {
            assert!(s.kappa > 0.0);
            if s.r < bq.r_plus {
                assert!(s.dpdr < 0.0, "dP/dr = {} at r = {}", s.dpdr, s.r);
            }
            if s.p > 0.0 {
                assert!(s.rho > 0.0);
            }
        }
    }

    #[test]
    fn boundary_slope_matches_minus_b() {
        let input = ModelInput::from_scaled(1e-2, 1e-3, poly15(), GEO).unwrap();
        let (profile, outcome) = solve_star(&input).unwrap();
        let ModelOutcome::MonotoneShort(bq) = outcome else { panic!() };
        let r = bq.r_plus * (1.0 - 1e-9);
        let y = profile.state_at(r).unwrap();
        let du = rhs_tovds_enthalpy(r, &y, profile.lambda, &profile.eos, &GEO).unwrap()[1];
        assert!(((du + bq.b) / bq.b).abs() < 1e-5);
    }

    #[test]
    fn zero_lambda_has_q_equal_gm() {
        let input = ModelInput::from_density(0.01, 0.0, poly15(), GEO);
        let (_, outcome) = solve_star(&input).unwrap();
        let ModelOutcome::MonotoneShort(bq) = outcome else { panic!() };
        assert!((bq.q_plus - bq.m_plus).abs() <= 1e-15 * bq.m_plus);
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let input = ModelInput::from_scaled(2e-2, 5e-3, poly15(), GEO).unwrap();
        let (profile, outcome) = solve_star(&input).unwrap();
        let ModelOutcome::MonotoneShort(bq) = outcome else { panic!() };
        let d2 = d2u_at_boundary(&bq, profile.lambda, &GEO);
        // backward second difference of u at the surface
        let h = 2e-3 * bq.r_plus;
        let u = |r: f64| profile.state_at(r).unwrap()[1];
        let fd = (2.0 * u(bq.r_plus) - 5.0 * u(bq.r_plus - h) + 4.0 * u(bq.r_plus - 2.0 * h) - u(bq.r_plus - 3.0 * h))
            / (h * h);
        assert!(((fd - d2) / d2).abs() < 1e-3, "{fd} vs {d2}");
        let no_lambda = BoundaryQuantities::new(bq.r_plus, bq.m_plus, 0.0, &GEO);
        let expected = 2.0 * no_lambda.q_plus / (bq.r_plus.powi(3) * no_lambda.kappa_plus)
            + 2.0 * no_lambda.q_plus.powi(2) / (bq.r_plus.powi(4) * no_lambda.kappa_plus.powi(2));
        assert!((d2u_at_boundary(&no_lambda, 0.0, &GEO) - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn d2u_scales_with_units() {
        // geometrized quantities mapped to SI: length L, mass L c²/G, u in c²
        let bq = BoundaryQuantities::new(3.0, 0.2, 1e-3, &GEO);
        let d2 = d2u_at_boundary(&bq, 1e-3, &GEO);
        let si = Constants::SI;
        let len = 1.7e3;
        let bq_si = BoundaryQuantities::new(3.0 * len, 0.2 * len * si.c2() / si.g, 1e-3 / (len * len), &si);
        let d2_si = d2u_at_boundary(&bq_si, 1e-3 / (len * len), &si);
        assert!((d2_si / (si.c2() / (len * len)) / d2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn einstein_static_keeps_pressure() {
        let eos = poly15();
        let rho_c: f64 = 0.01;
        let p_c = eos.pressure_of_density(rho_c).unwrap();
        let lambda = 4.0 * PI * (rho_c + 3.0 * p_c);
        let l = 8.0 * PI * rho_c + lambda;
        let r_edge = (3.0 / l).sqrt();
        let input = ModelInput::from_density(rho_c, lambda, eos, GEO).with_r_max(0.9 * r_edge);
        let (profile, outcome) = solve_star(&input).unwrap();
        assert!(matches!(outcome, ModelOutcome::Unterminated { .. }), "{outcome:?}");
        assert!(profile.constant_pressure);
        for s in &profile.samples {
            assert!((s.p / p_c - 1.0).abs() < 1e-6);
        }
        // without a cap the apparent horizon is reached
        let input = ModelInput::from_density(rho_c, lambda, poly15(), GEO);
        let (_, outcome) = solve_star(&input).unwrap();
        let ModelOutcome::HorizonDegenerate { r, .. } = outcome else { panic!("{outcome:?}") };
        assert!((r / r_edge - 1.0).abs() < 1e-4);
    }

    #[test]
    fn lambda_above_balance_is_non_monotone_at_center() {
        let eos = poly15();
        let rho_c: f64 = 0.01;
        let p_c = eos.pressure_of_density(rho_c).unwrap();
        let lambda = 1.2 * 4.0 * PI * (rho_c + 3.0 * p_c);
        let input = ModelInput::from_density(rho_c, lambda, eos, GEO);
        let (profile, outcome) = solve_star(&input).unwrap();
        let ModelOutcome::NonMonotone { r } = outcome else { panic!("{outcome:?}") };
        assert!((r - profile.r_start()).abs() <= 1e-12 * r);
        assert_eq!(profile.events[0].name, "pressure_increasing_at_center");
    }

    #[test]
    fn errors_carry_partial_profile() {
        let input = ModelInput::from_scaled(1e-3, 1e-3, poly15(), GEO)
            .unwrap()
            .with_ctrl(StepControl {
                max_steps: 5,
                ..StepControl::default()
            });
        let err = solve_star(&input).unwrap_err();
        let ModelError::Integration { partial: Some(p), .. } = err else { panic!("{err:?}") };
        assert!(!p.samples.is_empty());
    }

    #[test]
    fn invalid_inputs() {
        let eos = poly15();
        assert!(solve_star(&ModelInput::from_density(-1.0, 0.0, eos.clone(), GEO)).is_err());
        assert!(solve_star(&ModelInput::from_density(0.01, -1.0, eos.clone(), GEO)).is_err());
        assert!(solve_star(&ModelInput::from_density(0.01, 0.0, eos.clone(), GEO).with_r_max(0.0)).is_err());
        // acausal center
        assert!(solve_star(&ModelInput::from_density(10.0, 0.0, eos, GEO)).is_err());
    }

    #[test]
    fn smallness_conditions() {
        let eos = poly15();
        let c = smallness_check(0.05, 0.0, &eos, &GEO, 0.1).unwrap();
        assert_eq!(c.beta, 0.0);
        assert!(c.satisfied);
        let c = smallness_check(0.1, 0.0, &eos, &GEO, 0.1).unwrap();
        assert_eq!(c.alpha, 0.1);
        assert!(c.satisfied);
        let above = 1.01 * c.lambda_cap;
        let c = smallness_check(0.1, above, &eos, &GEO, 0.1).unwrap();
        assert!(c.feasible_u_c.is_none() && !c.satisfied);
        let c = smallness_check(0.1, 0.99 * c.lambda_cap, &eos, &GEO, 0.1).unwrap();
        let (lo, hi) = c.feasible_u_c.unwrap();
        assert!(lo < hi && c.satisfied);
        let soft = EosSpec::polytrope(1.0, 1.15, 1.0).unwrap();
        assert!(matches!(
            smallness_check(0.1, 0.0, &soft, &GEO, 0.1),
            Err(ModelError::GammaOutOfRange(_))
        ));
    }

    #[test]
    fn vacuum_continuation_solves_exterior_equation() {
        let eos = poly15();
        let (m_plus, r_plus) = (0.1, 2.0);
        let (_, u0) = vacuum_continuation_lambda0(m_plus, r_plus, &GEO, r_plus).unwrap();
        assert_eq!(u0, 0.0);
        let (_, u_far) = vacuum_continuation_lambda0(m_plus, r_plus, &GEO, 1e12).unwrap();
        assert!((u_far - 0.5 * (1.0f64 - 0.1).ln()).abs() < 1e-10);
        for i in 0..=20 {
            let r = r_plus * (1.0 + 0.1 * i as f64);
            let (m, u) = vacuum_continuation_lambda0(m_plus, r_plus, &GEO, r).unwrap();
            let h = 1e-5 * r;
            let du_fd = (vacuum_continuation_lambda0(m_plus, r_plus, &GEO, r + h).unwrap().1
                - vacuum_continuation_lambda0(m_plus, r_plus, &GEO, (r - h).max(r_plus)).unwrap().1)
                / (r + h - (r - h).max(r_plus));
            let rhs = rhs_tov(r, &[m, u], &eos, &GEO).unwrap();
            assert_eq!(rhs[0], 0.0);
            let exact = -m_plus / (r * r * (1.0 - 2.0 * m_plus / r));
            assert!((rhs[1] - exact).abs() < 1e-9);
            assert!((du_fd - exact).abs() < 1e-6);
        }
        assert!(vacuum_continuation_lambda0(1.0, 1.5, &GEO, 2.0).is_err());
    }
}
