//! Barotropic equation of state `P = A ρ^γ Ω(A ρ^{γ-1} / c²)` and the
//! enthalpy variable `u = ∫₀^ρ dP / (ρ + P/c²)`.
//!
//! With `ζ = Aρ^{γ-1}/c²` and `η = u/c²` the state is carried by three
//! derived factors, all equal to one at the origin:
//!
//! ```text
//! u = γA/(γ-1) ρ^{γ-1} Ω_u(ζ)
//! ρ = A₁ u^{1/(γ-1)} Ω_ρ(η)
//! P = A A₁^γ u^{γ/(γ-1)} Ω_P(η),     A₁ = ((γ-1)/(γA))^{1/(γ-1)}
//! ```

mod fermi;
mod omega;

pub use fermi::{density_integral, exact_omega, fermi_eos, omega_taylor, pressure_integral, FermiEosParams};
pub use omega::{Omega, PowerSeriesOmega, Unity};

use crate::numeric::{self, NumericError};
use std::sync::Arc;
use thiserror::Error;

/// Quadrature tolerances for `Ω_u`.
pub const QUAD_ABS_TOL: f64 = 1e-12;
pub const QUAD_REL_TOL: f64 = 1e-10;
/// Below this `|ζ|` the `Ω_u` integral is replaced by its two-term series.
pub const OMEGA_U_SERIES_CUTOFF: f64 = 1e-6;
pub const DEFAULT_DELTA_OMEGA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EosError {
    #[error("invalid equation of state: {0}")]
    InvalidParameter(String),
    #[error("argument {value} outside the domain [-{delta_omega}, inf) of Omega")]
    Domain { value: f64, delta_omega: f64 },
    #[error("negative density {0}")]
    NegativeDensity(f64),
    #[error("negative Fermi parameter {0}")]
    NegativeFermiParameter(f64),
    #[error("non-physical state at rho = {rho}: P = {pressure}, dP/drho = {dp_drho} (need P > 0 and 0 < dP/drho < c^2 = {c2})")]
    NonPhysical {
        rho: f64,
        pressure: f64,
        dp_drho: f64,
        c2: f64,
    },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Thermodynamic state at one density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub rho: f64,
    pub p: f64,
    pub u: f64,
    pub zeta: f64,
    pub eta: f64,
}

#[derive(Clone)]
pub struct EosSpec {
    a: f64,
    gamma: f64,
    c: f64,
    delta_omega: f64,
    omega: Arc<dyn Omega>,
    a1: f64,
    mu: f64,
}

impl std::fmt::Debug for EosSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EosSpec")
            .field("A", &self.a)
            .field("gamma", &self.gamma)
            .field("c", &self.c)
            .field("delta_omega", &self.delta_omega)
            .field("omega", &self.omega)
            .finish()
    }
}

impl EosSpec {
    pub fn new(a: f64, gamma: f64, c: f64, omega: Arc<dyn Omega>) -> Result<Self, EosError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(EosError::InvalidParameter(format!("A must be positive, got {a}")));
        }
        if !(gamma > 1.0 && gamma < 2.0) {
            return Err(EosError::InvalidParameter(format!(
                "gamma must lie in (1, 2), got {gamma}"
            )));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(EosError::InvalidParameter(format!("c must be positive, got {c}")));
        }
        let omega0 = omega.value(0.0);
        if (omega0 - 1.0).abs() > 1e-14 {
            return Err(EosError::InvalidParameter(format!(
                "Omega(0) must equal 1, got {omega0}"
            )));
        }
        let mu = 1.0 / (gamma - 1.0);
        let a1 = ((gamma - 1.0) / (gamma * a)).powf(mu);
        Ok(EosSpec {
            a,
            gamma,
            c,
            delta_omega: DEFAULT_DELTA_OMEGA,
            omega,
            a1,
            mu,
        })
    }

    /// Pure polytrope `P = A ρ^γ`.
    pub fn polytrope(a: f64, gamma: f64, c: f64) -> Result<Self, EosError> {
        EosSpec::new(a, gamma, c, Arc::new(Unity))
    }

    pub fn with_delta_omega(mut self, delta_omega: f64) -> Result<Self, EosError> {
        if !(delta_omega > 0.0 && delta_omega < 1.0) {
            return Err(EosError::InvalidParameter(format!(
                "delta_omega must lie in (0, 1), got {delta_omega}"
            )));
        }
        self.delta_omega = delta_omega;
        Ok(self)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn c2(&self) -> f64 {
        self.c * self.c
    }
    /// `μ = 1/(γ-1)`
    pub fn mu(&self) -> f64 {
        self.mu
    }
    /// `A₁ = ((γ-1)/(γA))^{1/(γ-1)}`
    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }
    pub fn omega(&self) -> &dyn Omega {
        self.omega.as_ref()
    }

    /// Same equation of state with a different speed of light.
    pub fn with_c(&self, c: f64) -> Result<Self, EosError> {
        let mut out = EosSpec::new(self.a, self.gamma, c, self.omega.clone())?;
        out.delta_omega = self.delta_omega;
        Ok(out)
    }

    fn check_domain(&self, value: f64) -> Result<(), EosError> {
        if value < -self.delta_omega || value.is_nan() {
            Err(EosError::Domain {
                value,
                delta_omega: self.delta_omega,
            })
        } else {
            Ok(())
        }
    }

    pub fn zeta_of_density(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma - 1.0) / self.c2()
    }

    fn pressure_unchecked(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma) * self.omega.value(self.zeta_of_density(rho))
    }

    fn dp_drho_unchecked(&self, rho: f64) -> f64 {
        let zeta = self.zeta_of_density(rho);
        self.a
            * rho.powf(self.gamma - 1.0)
            * (self.gamma * self.omega.value(zeta) + (self.gamma - 1.0) * zeta * self.omega.derivative(zeta))
    }

    /// `P(ρ)`; fails if the configured `Ω` gives `P ≤ 0` or an acausal or
    /// non-increasing pressure at this density.
    pub fn pressure_of_density(&self, rho: f64) -> Result<f64, EosError> {
        if rho == 0.0 {
            return Ok(0.0);
        }
        if !(rho > 0.0) {
            return Err(EosError::NegativeDensity(rho));
        }
        let p = self.pressure_unchecked(rho);
        let dp = self.dp_drho_unchecked(rho);
        if !(p > 0.0) || !(dp > 0.0) || !(dp < self.c2()) {
            return Err(EosError::NonPhysical {
                rho,
                pressure: p,
                dp_drho: dp,
                c2: self.c2(),
            });
        }
        Ok(p)
    }

    /// `dP/dρ = Aρ^{γ-1} (γΩ(ζ) + (γ-1) ζ Ω'(ζ))`
    pub fn dp_drho(&self, rho: f64) -> Result<f64, EosError> {
        if rho < 0.0 {
            return Err(EosError::NegativeDensity(rho));
        }
        Ok(self.dp_drho_unchecked(rho))
    }

    /// Checks `P > 0` and `0 < dP/dρ < c²` on a logarithmic grid over
    /// `[ρ_max·1e-8, ρ_max]`.
    pub fn check_physical(&self, rho_max: f64) -> Result<(), EosError> {
        const SAMPLES: usize = 64;
        for i in 0..=SAMPLES {
            let t = i as f64 / SAMPLES as f64;
            let rho = rho_max * 10f64.powf(-8.0 * (1.0 - t));
            self.pressure_of_density(rho)?;
        }
        Ok(())
    }

    // integrand of ζ Ω_u(ζ)
    fn omega_u_integrand(&self, zeta: f64) -> f64 {
        let om = self.omega.value(zeta);
        let dom = self.omega.derivative(zeta);
        (om + (self.gamma - 1.0) / self.gamma * zeta * dom) / (1.0 + zeta * om)
    }

    /// `Ω_u(ζ)`, closed form when the `Ω` provides one.
    pub fn omega_u(&self, zeta: f64) -> Result<f64, EosError> {
        self.check_domain(zeta)?;
        match self.omega.omega_u_closed(self.gamma, zeta) {
            Some(v) => Ok(v),
            None => self.omega_u_quadrature(zeta),
        }
    }

    /// `Ω_u(ζ) = (1/ζ)∫₀^ζ [Ω + (γ-1)/γ ζ'Ω'] / (1 + ζ'Ω) dζ'` by adaptive
    /// quadrature, regardless of closed forms.
    pub fn omega_u_quadrature(&self, zeta: f64) -> Result<f64, EosError> {
        self.check_domain(zeta)?;
        if zeta == 0.0 {
            return Ok(1.0);
        }
        if zeta.abs() < OMEGA_U_SERIES_CUTOFF {
            // f(0) = 1, f'(0) = (2γ-1)/γ Ω'(0) - 1
            let slope = (2.0 * self.gamma - 1.0) / self.gamma * self.omega.derivative(0.0) - 1.0;
            return Ok(1.0 + 0.5 * slope * zeta);
        }
        // (1/ζ)∫₀^ζ f = ∫₀¹ f(ζ t) dt
        Ok(numeric::integrate(
            |t| self.omega_u_integrand(zeta * t),
            0.0,
            1.0,
            QUAD_ABS_TOL,
            QUAD_REL_TOL,
        )?)
    }

    /// Solves `η = γ/(γ-1) ζ Ω_u(ζ)` for `ζ`.
    pub fn zeta_of_eta(&self, eta: f64) -> Result<f64, EosError> {
        self.check_domain(eta)?;
        match self.omega.zeta_of_eta_closed(self.gamma, eta) {
            Some(z) => {
                self.check_domain(z)?;
                Ok(z)
            }
            None => self.zeta_of_eta_rootfind(eta),
        }
    }

    /// Root-finding inversion of `η(ζ)`: bracket `[0, η]` grown
    /// geometrically, then Newton steps with `dη/dζ = γ/(γ-1) f(ζ)`.
    pub fn zeta_of_eta_rootfind(&self, eta: f64) -> Result<f64, EosError> {
        self.check_domain(eta)?;
        if eta == 0.0 {
            return Ok(0.0);
        }
        let k = self.gamma / (self.gamma - 1.0);
        let residual = |z: f64| -> Result<(f64, f64), EosError> {
            let ou = self.omega_u_quadrature(z)?;
            Ok((k * z * ou - eta, k * self.omega_u_integrand(z)))
        };
        let (lo, hi) = if eta > 0.0 {
            let mut hi = eta;
            let mut grown = 0;
            while residual(hi)?.0 < 0.0 {
                hi *= 2.0;
                grown += 1;
                if grown > 200 {
                    return Err(NumericError::NoBracket { lo: 0.0, hi }.into());
                }
            }
            (0.0, hi)
        } else {
            let floor = -self.delta_omega * (1.0 - 1e-12);
            let mut lo = eta.max(floor);
            while residual(lo)?.0 > 0.0 {
                if lo <= floor {
                    return Err(EosError::Domain {
                        value: eta,
                        delta_omega: self.delta_omega,
                    });
                }
                lo = (2.0 * lo).max(floor);
            }
            (lo, 0.0)
        };
        numeric::newton_bisect(residual, lo, hi, 1e-16, 200)
    }

    /// `(Ω_ρ(η), Ω_P(η))`.
    pub fn omega_rho_p(&self, eta: f64) -> Result<(f64, f64), EosError> {
        self.check_domain(eta)?;
        if eta == 0.0 {
            return Ok((1.0, 1.0));
        }
        let zeta = self.zeta_of_eta(eta)?;
        self.omega_rho_p_from_zeta(eta, zeta)
    }

    /// Same as [`Self::omega_rho_p`] but always through the root finder.
    pub fn omega_rho_p_rootfind(&self, eta: f64) -> Result<(f64, f64), EosError> {
        self.check_domain(eta)?;
        if eta == 0.0 {
            return Ok((1.0, 1.0));
        }
        let zeta = self.zeta_of_eta_rootfind(eta)?;
        self.omega_rho_p_from_zeta(eta, zeta)
    }

    fn omega_rho_p_from_zeta(&self, eta: f64, zeta: f64) -> Result<(f64, f64), EosError> {
        // ρ = A₁u^μΩ_ρ forces Ω_ρ = Ω_u^{-μ}, with Ω_u = (γ-1)η / (γζ)
        let omega_u = (self.gamma - 1.0) * eta / (self.gamma * zeta);
        let omega_rho = omega_u.powf(-self.mu);
        let omega_p = self.omega.value(zeta) * omega_u.powf(-self.gamma / (self.gamma - 1.0));
        Ok((omega_rho, omega_p))
    }

    /// `u(ρ) = γA/(γ-1) ρ^{γ-1} Ω_u(Aρ^{γ-1}/c²)`.
    pub fn u_of_density(&self, rho: f64) -> Result<f64, EosError> {
        if rho == 0.0 {
            return Ok(0.0);
        }
        if !(rho > 0.0) {
            return Err(EosError::NegativeDensity(rho));
        }
        let zeta = self.zeta_of_density(rho);
        Ok(self.gamma * self.a / (self.gamma - 1.0) * rho.powf(self.gamma - 1.0) * self.omega_u(zeta)?)
    }

    /// `(ρ, P)` as functions of the enthalpy; both vanish for `u ≤ 0`.
    pub fn density_pressure_of_u(&self, u: f64) -> Result<(f64, f64), EosError> {
        self.check_domain(u / self.c2())?;
        if u <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let (orho, op) = self.omega_rho_p(u / self.c2())?;
        let rho = self.a1 * u.powf(self.mu) * orho;
        let p = self.a * self.a1.powf(self.gamma) * u.powf(self.mu + 1.0) * op;
        Ok((rho, p))
    }

    pub fn density_of_u(&self, u: f64) -> Result<f64, EosError> {
        Ok(self.density_pressure_of_u(u)?.0)
    }

    pub fn pressure_of_u(&self, u: f64) -> Result<f64, EosError> {
        Ok(self.density_pressure_of_u(u)?.1)
    }

    /// Inverts `P(ρ)`.
    pub fn density_of_pressure(&self, p: f64) -> Result<f64, EosError> {
        if p == 0.0 {
            return Ok(0.0);
        }
        if !(p > 0.0) {
            return Err(EosError::InvalidParameter(format!("negative pressure {p}")));
        }
        let mut hi = 2.0 * (p / self.a).powf(1.0 / self.gamma);
        let mut grown = 0;
        while self.pressure_unchecked(hi) < p {
            hi *= 2.0;
            grown += 1;
            if grown > 200 {
                return Err(NumericError::NoBracket { lo: 0.0, hi }.into());
            }
        }
        numeric::newton_bisect(
            |rho| Ok((self.pressure_unchecked(rho) - p, self.dp_drho_unchecked(rho))),
            0.0,
            hi,
            1e-16,
            200,
        )
    }

    pub fn thermo_state(&self, rho: f64) -> Result<ThermoState, EosError> {
        let p = self.pressure_of_density(rho)?;
        let u = self.u_of_density(rho)?;
        Ok(ThermoState {
            rho,
            p,
            u,
            zeta: self.zeta_of_density(rho),
            eta: u / self.c2(),
        })
    }
}
