//! Adaptive Dormand–Prince 5(4) integrator with a fourth-order continuous
//! extension and root-located events.
//!
//! Every accepted step keeps its interpolation coefficients, so the returned
//! [`DenseSolution`] can be evaluated anywhere on the integrated span. Events
//! are scalar guards `g(x, y)` checked at step endpoints; a sign change in
//! the requested direction is refined on the interpolant.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// continuous extension (Hairer & Wanner, DOPRI5)
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
/// Step shrink factor after a right-hand-side domain failure.
const DOMAIN_SHRINK: f64 = 0.25;
pub const EVENT_MAX_ITER: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            h_init: 1e-3,
            h_max: 0.25,
            max_steps: 200_000,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(format!(
                "tolerances must be positive (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            ));
        }
        if !(self.h_init > 0.0) || !(self.h_init <= self.h_max) {
            return Err(format!(
                "need 0 < h_init <= h_max (h_init = {}, h_max = {})",
                self.h_init, self.h_max
            ));
        }
        if self.max_steps == 0 {
            return Err("max_steps must be positive".into());
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `g` goes from positive to non-positive.
    Falling,
    /// `g` goes from negative to non-negative.
    Rising,
    Any,
}

impl Direction {
    fn crosses(self, before: f64, after: f64) -> bool {
        let falling = before > 0.0 && after <= 0.0;
        let rising = before < 0.0 && after >= 0.0;
        match self {
            Direction::Falling => falling,
            Direction::Rising => rising,
            Direction::Any => falling || rising,
        }
    }
}

type Guard<'a, const N: usize> = Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>;

pub struct EventSpec<'a, const N: usize> {
    pub name: String,
    pub guard: Guard<'a, N>,
    pub direction: Direction,
    pub root_tol: f64,
    pub terminal: bool,
}

impl<'a, const N: usize> EventSpec<'a, N> {
    /// Non-terminal event detecting any sign change, located to `1e-12`.
    pub fn new(name: impl Into<String>, guard: impl Fn(f64, &[f64; N]) -> f64 + 'a) -> Self {
        EventSpec {
            name: name.into(),
            guard: Box::new(guard),
            direction: Direction::Any,
            root_tol: 1e-12,
            terminal: false,
        }
    }

    pub fn direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn terminal(mut self, terminal: bool) -> Self {
        self.terminal = terminal;
        self
    }

    pub fn root_tol(mut self, root_tol: f64) -> Self {
        self.root_tol = root_tol;
        self
    }
}

impl<const N: usize> fmt::Debug for EventSpec<'_, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EventSpec")
            .field("name", &self.name)
            .field("direction", &self.direction)
            .field("root_tol", &self.root_tol)
            .field("terminal", &self.terminal)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord<const N: usize> {
    /// Index into the event list passed to [`integrate_adaptive`].
    pub event: usize,
    pub x: f64,
    pub y: [f64; N],
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep<const N: usize> {
    pub x0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    diff: [f64; N],
    bspl: [f64; N],
    c4: [f64; N],
    c5: [f64; N],
}

impl<const N: usize> DenseStep<N> {
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x0 && x <= self.x1()
    }

    /// Interpolated state; exact at both step endpoints.
    pub fn eval(&self, x: f64) -> [f64; N] {
        if x == self.x0 {
            return self.y0;
        }
        if x == self.x1() {
            return self.y1;
        }
        let t = (x - self.x0) / self.h;
        let s = 1.0 - t;
        std::array::from_fn(|i| {
            self.y0[i] + t * (self.diff[i] + s * (self.bspl[i] + t * (self.c4[i] + s * self.c5[i])))
        })
    }

    /// Derivative of the interpolant.
    pub fn derivative(&self, x: f64) -> [f64; N] {
        let t = (x - self.x0) / self.h;
        let s = 1.0 - t;
        std::array::from_fn(|i| {
            (self.diff[i]
                + (1.0 - 2.0 * t) * self.bspl[i]
                + t * (2.0 - 3.0 * t) * self.c4[i]
                + 2.0 * t * s * (s - t) * self.c5[i])
                / self.h
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Reached the end of the requested span.
    Completed,
    /// Stopped by the terminal event with this index.
    Terminated { event: usize },
    /// Stopped by an error; see [`IntegrationFailure`].
    Failed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution<const N: usize> {
    x_start: f64,
    y_start: [f64; N],
    x_end: f64,
    y_end: [f64; N],
    steps: Vec<DenseStep<N>>,
    events: Vec<EventRecord<N>>,
    status: Status,
    stats: Stats,
}

impl<const N: usize> DenseSolution<N> {
    fn start(x: f64, y: [f64; N]) -> Self {
        DenseSolution {
            x_start: x,
            y_start: y,
            x_end: x,
            y_end: y,
            steps: Vec::new(),
            events: Vec::new(),
            status: Status::Completed,
            stats: Stats::default(),
        }
    }

    pub fn x_start(&self) -> f64 {
        self.x_start
    }
    pub fn y_start(&self) -> [f64; N] {
        self.y_start
    }
    pub fn x_end(&self) -> f64 {
        self.x_end
    }
    pub fn y_end(&self) -> [f64; N] {
        self.y_end
    }
    pub fn steps(&self) -> &[DenseStep<N>] {
        &self.steps
    }
    pub fn events(&self) -> &[EventRecord<N>] {
        &self.events
    }
    pub fn status(&self) -> Status {
        self.status
    }
    pub fn stats(&self) -> Stats {
        self.stats
    }

    /// First record of the given event, if it fired.
    pub fn first_event(&self, event: usize) -> Option<&EventRecord<N>> {
        self.events.iter().find(|e| e.event == event)
    }

    fn step_at(&self, x: f64) -> Option<&DenseStep<N>> {
        if x < self.x_start || x > self.x_end || self.steps.is_empty() {
            return None;
        }
        let idx = self.steps.partition_point(|s| s.x1() < x);
        self.steps.get(idx.min(self.steps.len() - 1))
    }

    /// State at `x` on `[x_start, x_end]`, `None` outside.
    pub fn eval(&self, x: f64) -> Option<[f64; N]> {
        if x == self.x_end {
            return Some(self.y_end);
        }
        if x == self.x_start {
            return Some(self.y_start);
        }
        self.step_at(x).map(|s| s.eval(x))
    }

    /// Derivative of the interpolant at `x`.
    pub fn derivative(&self, x: f64) -> Option<[f64; N]> {
        self.step_at(x).map(|s| s.derivative(x))
    }

    /// Accepted step endpoints `(x, y)`, starting with the initial point and
    /// ending at `x_end`.
    pub fn knots(&self) -> Vec<(f64, [f64; N])> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push((self.x_start, self.y_start));
        for s in &self.steps {
            if s.x1() < self.x_end {
                out.push((s.x1(), s.y1));
            }
        }
        if self.x_end > self.x_start {
            out.push((self.x_end, self.y_end));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError<E: fmt::Debug + fmt::Display> {
    #[error("invalid integration request: {0}")]
    Invalid(String),
    #[error("step budget of {max_steps} exhausted at x = {x}")]
    StepBudget { x: f64, max_steps: usize },
    #[error("step size underflow at x = {x} (h = {h:e}){}", .cause.as_ref().map(|c| format!(": {c}")).unwrap_or_default())]
    StepUnderflow { x: f64, h: f64, cause: Option<E> },
    #[error("right-hand side failed at x = {x}: {source}")]
    Rhs { x: f64, source: E },
}

/// Error together with everything integrated before it occurred.
#[derive(Debug, Clone)]
pub struct IntegrationFailure<E: fmt::Debug + fmt::Display, const N: usize> {
    pub error: IntegrateError<E>,
    pub partial: DenseSolution<N>,
}

impl<E: fmt::Debug + fmt::Display, const N: usize> fmt::Display for IntegrationFailure<E, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("guard does not change sign in the requested direction on the segment")]
pub struct EventNotFound;

/// Refines a guard root on one dense step with a bisection/regula-falsi
/// (Illinois) hybrid, capped at [`EVENT_MAX_ITER`] iterations.
pub fn locate_event<const N: usize>(
    segment: &DenseStep<N>,
    guard: &dyn Fn(f64, &[f64; N]) -> f64,
    direction: Direction,
    root_tol: f64,
) -> Result<(f64, [f64; N]), EventNotFound> {
    let mut a = segment.x0;
    let mut b = segment.x1();
    let mut ga = guard(a, &segment.y0);
    let mut gb = guard(b, &segment.y1);
    if !direction.crosses(ga, gb) {
        return Err(EventNotFound);
    }
    // Illinois: halve the stale endpoint's value when the same side is kept twice
    let mut kept = 0i8;
    for it in 0..EVENT_MAX_ITER {
        if b - a <= root_tol || gb == 0.0 {
            break;
        }
        let mut x = b - gb * (b - a) / (gb - ga);
        if it % 4 == 3 || !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let gx = guard(x, &segment.eval(x));
        if gx == 0.0 || gx.signum() == gb.signum() {
            b = x;
            gb = gx;
            if kept == 1 {
                ga *= 0.5;
            }
            kept = 1;
        } else {
            a = x;
            ga = gx;
            if kept == -1 {
                gb *= 0.5;
            }
            kept = -1;
        }
    }
    // the right end has the post-crossing sign, so the event state is taken there
    Ok((b, segment.eval(b)))
}

fn rms_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], ctrl: &StepControl) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = ctrl.abs_tol + ctrl.rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrates `dy/dx = rhs(x, y)` from `(x0, y0)` toward `x1 > x0`.
///
/// A right-hand-side failure inside a trial step is treated as a rejected
/// step (the step is shrunk); a failure at an accepted state, a step-size
/// underflow, or an exhausted step budget is returned together with the
/// partial solution.
pub fn integrate_adaptive<F, E, const N: usize>(
    mut rhs: F,
    y0: [f64; N],
    span: (f64, f64),
    ctrl: &StepControl,
    events: &[EventSpec<'_, N>],
) -> Result<DenseSolution<N>, IntegrationFailure<E, N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    E: fmt::Debug + fmt::Display,
{
    let (x0, x1) = span;
    let mut sol = DenseSolution::start(x0, y0);
    let fail = |sol: DenseSolution<N>, error: IntegrateError<E>| {
        let mut partial = sol;
        partial.status = Status::Failed;
        Err(IntegrationFailure { error, partial })
    };
    if let Err(msg) = ctrl.validate() {
        return fail(sol, IntegrateError::Invalid(msg));
    }
    if !(x1 > x0) || !x0.is_finite() || !x1.is_finite() {
        return fail(sol, IntegrateError::Invalid(format!("degenerate span ({x0}, {x1})")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return fail(sol, IntegrateError::Invalid("non-finite initial state".into()));
    }

    let mut x = x0;
    let mut y = y0;
    let mut k1 = match rhs(x, &y) {
        Ok(k) => k,
        Err(source) => return fail(sol, IntegrateError::Rhs { x, source }),
    };
    sol.stats.rhs_evals += 1;
    let mut guards: Vec<f64> = events.iter().map(|e| (e.guard)(x, &y)).collect();
    let mut h = ctrl.h_init.min(ctrl.h_max).min(x1 - x0);
    let mut last_rejected = false;
    let mut last_rhs_error: Option<E> = None;

    loop {
        if sol.stats.accepted >= ctrl.max_steps {
            return fail(sol, IntegrateError::StepBudget { x, max_steps: ctrl.max_steps });
        }
        let h_min = 16.0 * f64::EPSILON * x.abs().max(1e-300);
        if h < h_min {
            return fail(sol, IntegrateError::StepUnderflow { x, h, cause: last_rhs_error });
        }
        let last = x + h >= x1;
        if last {
            h = x1 - x;
        }

        // stages; any domain failure shrinks the step
        let trial = (|| -> Result<([f64; N], [f64; N], [[f64; N]; 7]), E> {
            let k2 = rhs(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
            let k3 = rhs(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = rhs(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = rhs(
                x + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            )?;
            let xph = if last { x1 } else { x + h };
            let k6 = rhs(
                xph,
                &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            )?;
            let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = rhs(xph, &y_new)?;
            let err: [f64; N] = std::array::from_fn(|i| {
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            });
            Ok((y_new, err, [k1, k2, k3, k4, k5, k6, k7]))
        })();

        let (y_new, err, k) = match trial {
            Ok(t) => {
                sol.stats.rhs_evals += 6;
                t
            }
            Err(e) => {
                last_rhs_error = Some(e);
                sol.stats.rejected += 1;
                h *= DOMAIN_SHRINK;
                last_rejected = true;
                continue;
            }
        };
        if y_new.iter().any(|v| !v.is_finite()) {
            sol.stats.rejected += 1;
            h *= DOMAIN_SHRINK;
            last_rejected = true;
            continue;
        }

        let err_norm = rms_norm(&err, &y, &y_new, ctrl);
        if err_norm > 1.0 {
            sol.stats.rejected += 1;
            h *= (SAFETY * err_norm.powf(-0.2)).max(FAC_MIN);
            last_rejected = true;
            continue;
        }

        // accepted
        let x_new = if last { x1 } else { x + h };
        let diff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
        let bspl: [f64; N] = std::array::from_fn(|i| h * k[0][i] - diff[i]);
        let c4: [f64; N] = std::array::from_fn(|i| diff[i] - h * k[6][i] - bspl[i]);
        let c5: [f64; N] = std::array::from_fn(|i| {
            h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i])
        });
        let step = DenseStep {
            x0: x,
            h: x_new - x,
            y0: y,
            y1: y_new,
            diff,
            bspl,
            c4,
            c5,
        };
        sol.stats.accepted += 1;
        last_rhs_error = None;

        // events on this step, in abscissa order
        let new_guards: Vec<f64> = events.iter().map(|e| (e.guard)(x_new, &y_new)).collect();
        let mut hits: Vec<EventRecord<N>> = Vec::new();
        for (i, ev) in events.iter().enumerate() {
            if ev.direction.crosses(guards[i], new_guards[i]) {
                if let Ok((xe, ye)) = locate_event(&step, ev.guard.as_ref(), ev.direction, ev.root_tol) {
                    hits.push(EventRecord { event: i, x: xe, y: ye });
                }
            }
        }
        hits.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.event.cmp(&b.event)));
        sol.steps.push(step);
        let mut stop = None;
        for hit in hits {
            let terminal = events[hit.event].terminal;
            let (xe, ye, idx) = (hit.x, hit.y, hit.event);
            sol.events.push(hit);
            if terminal {
                stop = Some((idx, xe, ye));
                break;
            }
        }
        if let Some((idx, xe, ye)) = stop {
            sol.x_end = xe;
            sol.y_end = ye;
            sol.status = Status::Terminated { event: idx };
            return Ok(sol);
        }

        x = x_new;
        y = y_new;
        sol.x_end = x;
        sol.y_end = y;
        k1 = k[6];
        guards = new_guards;
        if last {
            sol.status = Status::Completed;
            return Ok(sol);
        }

        let mut fac = (SAFETY * err_norm.max(1e-10).powf(-0.2)).clamp(FAC_MIN, FAC_MAX);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = (h * fac).min(ctrl.h_max);
    }
}
