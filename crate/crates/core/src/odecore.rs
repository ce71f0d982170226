//! Right-hand sides and center germs of the stellar structure equations.
//!
//! States are passed as `(r, y)` with `y = [m, P]` (pressure form),
//! `y = [m, u]` (enthalpy form) or `y = [M, U]` (scaled form), which is the
//! shape the integrator consumes. All functions are pure.

use crate::eos::{EosError, EosSpec};
use crate::units::Constants;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("kappa = {kappa:e} <= 0 at r = {r}: the solution touches a horizon")]
    Horizon { r: f64, kappa: f64 },
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error("invalid scaling: {0}")]
    InvalidScaling(String),
}

/// `max(u, 0)^p`
#[inline]
pub fn pos_pow(u: f64, p: f64) -> f64 {
    if u > 0.0 {
        u.powf(p)
    } else {
        0.0
    }
}

/// `κ(r, m) = 1 − 2Gm/(c²r) − Λr²/3`
pub fn kappa(r: f64, m: f64, lambda: f64, k: &Constants) -> f64 {
    1.0 - 2.0 * k.g * m / (k.c2() * r) - lambda / 3.0 * r * r
}

/// `Q(r, m, P) = G(m + 4πr³P/c²) − c²Λr³/3`
pub fn q_function(r: f64, m: f64, p: f64, lambda: f64, k: &Constants) -> f64 {
    let r3 = r * r * r;
    k.g * (m + 4.0 * PI * r3 * p / k.c2()) - k.c2() * lambda / 3.0 * r3
}

/// Scaled `κ = 1 − 2αM/R − αβR²/3`
pub fn kappa_scaled(r: f64, m: f64, alpha: f64, beta: f64) -> f64 {
    1.0 - 2.0 * alpha * m / r - alpha * beta * r * r / 3.0
}

fn check_kappa(r: f64, kappa: f64) -> Result<(), OdeError> {
    if kappa > 0.0 {
        Ok(())
    } else {
        Err(OdeError::Horizon { r, kappa })
    }
}

/// `(dm/dr, dP/dr)` with `ρ` obtained by inverting the equation of state.
pub fn rhs_tovds_pressure(
    r: f64,
    y: &[f64; 2],
    lambda: f64,
    eos: &EosSpec,
    k: &Constants,
) -> Result<[f64; 2], OdeError> {
    let [m, p] = *y;
    let kap = kappa(r, m, lambda, k);
    check_kappa(r, kap)?;
    let rho = eos.density_of_pressure(p.max(0.0))?;
    let dm = 4.0 * PI * r * r * rho;
    let dp = -(rho + p / k.c2()) * q_function(r, m, p, lambda, k) / (r * r * kap);
    Ok([dm, dp])
}

/// Density and pressure along the enthalpy variable, zero for `u ≤ 0`.
fn matter_of_u(u: f64, eos: &EosSpec) -> Result<(f64, f64), OdeError> {
    Ok(eos.density_pressure_of_u(u)?)
}

/// `(dm/dr, du/dr)` of the enthalpy form.
pub fn rhs_tovds_enthalpy(
    r: f64,
    y: &[f64; 2],
    lambda: f64,
    eos: &EosSpec,
    k: &Constants,
) -> Result<[f64; 2], OdeError> {
    let [m, u] = *y;
    let kap = kappa(r, m, lambda, k);
    check_kappa(r, kap)?;
    let (rho, p) = matter_of_u(u, eos)?;
    let dm = 4.0 * PI * r * r * rho;
    let du = -q_function(r, m, p, lambda, k) / (r * r * kap);
    Ok([dm, du])
}

/// Enthalpy form with `Λ = 0`.
pub fn rhs_tov(r: f64, y: &[f64; 2], eos: &EosSpec, k: &Constants) -> Result<[f64; 2], OdeError> {
    rhs_tovds_enthalpy(r, y, 0.0, eos, k)
}

fn omega_factors(eta: f64, eos: &EosSpec) -> Result<(f64, f64), OdeError> {
    Ok(eos.omega_rho_p(eta)?)
}

/// `(dM/dR, dU/dR)` of the homologous (dimensionless) form.
pub fn rhs_scaled(r: f64, y: &[f64; 2], alpha: f64, beta: f64, eos: &EosSpec) -> Result<[f64; 2], OdeError> {
    let [m, u] = *y;
    let kap = kappa_scaled(r, m, alpha, beta);
    check_kappa(r, kap)?;
    let mu = eos.mu();
    let (o_rho, o_p) = if u > 0.0 { omega_factors(alpha * u, eos)? } else { (1.0, 1.0) };
    let dm = r * r * pos_pow(u, mu) * o_rho;
    let numer = m + alpha * r * r * r * pos_pow(u, mu + 1.0) * o_p / (mu + 1.0) - beta * r * r * r / 3.0;
    let du = -numer / (r * r * kap);
    Ok([dm, du])
}

/// Form with the central enthalpy as unit and the speed of light explicit.
pub fn rhs_tov11(r: f64, y: &[f64; 2], lambda: f64, c: f64, eos: &EosSpec) -> Result<[f64; 2], OdeError> {
    let [m, u] = *y;
    let c2 = c * c;
    let kap = 1.0 - 2.0 * m / (c2 * r) - lambda * r * r / (3.0 * c2);
    check_kappa(r, kap)?;
    let mu = eos.mu();
    let gamma = eos.gamma();
    let (o_rho, o_p) = if u > 0.0 { omega_factors(u / c2, eos)? } else { (1.0, 1.0) };
    let r3 = r * r * r;
    let dm = r * r * pos_pow(u, mu) * o_rho;
    let bracket = m + (gamma - 1.0) / gamma * r3 / c2 * pos_pow(u, mu + 1.0) * o_p - lambda / 3.0 * r3;
    Ok([dm, -bracket / (r * r) / kap])
}

/// Lane–Emden(–de Sitter) system; `lambda = 0` is the classical equation.
pub fn rhs_lane_emden(r: f64, y: &[f64; 2], mu: f64, lambda: f64) -> [f64; 2] {
    let [m, u] = *y;
    let dm = r * r * pos_pow(u, mu);
    let numer = m - lambda * r * r * r / 3.0;
    [dm, -numer / (r * r)]
}

/// Leading terms of the regular solution at the center, pressure form.
pub fn center_germ_physical(
    rho_c: f64,
    lambda: f64,
    eos: &EosSpec,
    k: &Constants,
    r: f64,
) -> Result<(f64, f64), OdeError> {
    let p_c = eos.pressure_of_density(rho_c)?;
    let m = 4.0 * PI / 3.0 * rho_c * r * r * r;
    let curvature = (rho_c + p_c / k.c2()) * (4.0 * PI * k.g * (rho_c + 3.0 * p_c / k.c2()) - k.c2() * lambda);
    Ok((m, p_c - curvature * r * r / 6.0))
}

/// Coefficient `c₂` in the scaled germ `U = 1 − c₂R²/6`.
pub fn scaled_germ_curvature(alpha: f64, beta: f64, eos: &EosSpec) -> Result<f64, OdeError> {
    let (o_rho, o_p) = omega_factors(alpha, eos)?;
    let g = eos.gamma();
    Ok(o_rho + 3.0 * (g - 1.0) / g * alpha * o_p - beta)
}

/// Leading terms of the regular solution at the center, scaled form.
pub fn center_germ_scaled(alpha: f64, beta: f64, eos: &EosSpec, r: f64) -> Result<(f64, f64), OdeError> {
    let (o_rho, _) = omega_factors(alpha, eos)?;
    let c2 = scaled_germ_curvature(alpha, beta, eos)?;
    Ok((o_rho * r * r * r / 3.0, 1.0 - c2 * r * r / 6.0))
}

/// Homologous change of variables `r = aR`, `m = a³b^μ·4πA₁·M`, `u = bU`
/// with `b = u_c` and `4πGA₁a²b^{μ−1} = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `c²Λ / (4πGA₁)`
    pub lambda_scaled: f64,
    pub cosmological_constant: f64,
    pub g: f64,
    pub c: f64,
    pub mu: f64,
    pub a1: f64,
}

impl ScalingParams {
    pub fn new(u_c: f64, lambda: f64, eos: &EosSpec, k: &Constants) -> Result<Self, OdeError> {
        if !(u_c > 0.0) || !u_c.is_finite() {
            return Err(OdeError::InvalidScaling(format!("central enthalpy must be positive, got {u_c}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(OdeError::InvalidScaling(format!(
                "cosmological constant must be non-negative, got {lambda}"
            )));
        }
        if ((eos.c() - k.c) / k.c).abs() > 1e-12 {
            return Err(OdeError::InvalidScaling(format!(
                "equation of state uses c = {} but the unit system has c = {}",
                eos.c(),
                k.c
            )));
        }
        let mu = eos.mu();
        let a1 = eos.a1();
        let four_pi_g_a1 = 4.0 * PI * k.g * a1;
        let a = (four_pi_g_a1 * u_c.powf(mu - 1.0)).powf(-0.5);
        let lambda_scaled = k.c2() * lambda / four_pi_g_a1;
        Ok(ScalingParams {
            a,
            b: u_c,
            alpha: u_c / k.c2(),
            beta: u_c.powf(-mu) * lambda_scaled,
            lambda_scaled,
            cosmological_constant: lambda,
            g: k.g,
            c: k.c,
            mu,
            a1,
        })
    }

    /// Physical parameters reproducing given `(α, β)`; needs `α > 0`.
    pub fn from_scaled(alpha: f64, beta: f64, eos: &EosSpec, k: &Constants) -> Result<Self, OdeError> {
        if !(alpha > 0.0) {
            return Err(OdeError::InvalidScaling(format!(
                "alpha must be positive to define physical units, got {alpha}"
            )));
        }
        let u_c = alpha * k.c2();
        let lambda_scaled = beta * u_c.powf(eos.mu());
        let lambda = 4.0 * PI * k.g * eos.a1() * lambda_scaled / k.c2();
        ScalingParams::new(u_c, lambda, eos, k)
    }

    pub fn mass_unit(&self) -> f64 {
        self.a.powi(3) * self.b.powf(self.mu) * 4.0 * PI * self.a1
    }

    /// `(r, m, u)` of a scaled state.
    pub fn to_physical(&self, r: f64, y: &[f64; 2]) -> (f64, [f64; 2]) {
        (self.a * r, [self.mass_unit() * y[0], self.b * y[1]])
    }

    pub fn to_scaled(&self, r: f64, y: &[f64; 2]) -> (f64, [f64; 2]) {
        (r / self.a, [y[0] / self.mass_unit(), y[1] / self.b])
    }

    /// Maps scaled derivatives `(dM/dR, dU/dR)` to `(dm/dr, du/dr)`.
    pub fn derivatives_to_physical(&self, d: &[f64; 2]) -> [f64; 2] {
        [self.mass_unit() / self.a * d[0], self.b / self.a * d[1]]
    }
}
