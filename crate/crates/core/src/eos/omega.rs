use std::fmt;

/// Analytic correction factor in `P = A ρ^γ Ω(A ρ^{γ-1} / c²)`.
///
/// Implementations must satisfy `Ω(0) = 1` and be analytic on a neighborhood
/// of `[-δ_Ω, ∞)`. The optional closed-form hooks let an implementation skip
/// the generic quadrature and root-finding paths of [`super::EosSpec`].
pub trait Omega: Send + Sync + fmt::Debug {
    fn value(&self, zeta: f64) -> f64;

    fn derivative(&self, zeta: f64) -> f64;

    /// Closed form of `Ω_u(ζ)` for the given adiabatic exponent, if known.
    fn omega_u_closed(&self, _gamma: f64, _zeta: f64) -> Option<f64> {
        None
    }

    /// Closed-form solution `ζ` of `η = γ/(γ-1) ζ Ω_u(ζ)`, if known.
    fn zeta_of_eta_closed(&self, _gamma: f64, _eta: f64) -> Option<f64> {
        None
    }
}

/// `Ω ≡ 1`: the pure polytrope `P = A ρ^γ`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Unity;

impl Omega for Unity {
    fn value(&self, _zeta: f64) -> f64 {
        1.0
    }

    fn derivative(&self, _zeta: f64) -> f64 {
        0.0
    }

    // Ω_u(ζ) = log(1 + ζ) / ζ
    fn omega_u_closed(&self, _gamma: f64, zeta: f64) -> Option<f64> {
        if zeta == 0.0 {
            Some(1.0)
        } else {
            Some(zeta.ln_1p() / zeta)
        }
    }

    // η = γ/(γ-1) log(1 + ζ)
    fn zeta_of_eta_closed(&self, gamma: f64, eta: f64) -> Option<f64> {
        Some((eta * (gamma - 1.0) / gamma).exp_m1())
    }
}

/// Truncated power series `Ω(ζ) = 1 + c₁ζ + c₂ζ² + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeriesOmega {
    // coefficients of ζ^0, ζ^1, ...; coeffs[0] == 1
    coeffs: Vec<f64>,
}

impl PowerSeriesOmega {
    /// Builds `1 + Σ tail[k-1] ζ^k`; the constant term is fixed to one.
    pub fn from_tail(tail: &[f64]) -> Self {
        let mut coeffs = Vec::with_capacity(tail.len() + 1);
        coeffs.push(1.0);
        coeffs.extend_from_slice(tail);
        PowerSeriesOmega { coeffs }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }
}

impl Omega for PowerSeriesOmega {
    fn value(&self, zeta: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * zeta + c)
    }

    fn derivative(&self, zeta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * zeta + k as f64 * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_horner_and_derivative() {
        let om = PowerSeriesOmega::from_tail(&[2.0, -3.0]);
        assert_eq!(om.value(0.0), 1.0);
        assert!((om.value(0.5) - (1.0 + 1.0 - 0.75)).abs() < 1e-15);
        assert!((om.derivative(0.5) - (2.0 - 3.0)).abs() < 1e-15);
    }

    #[test]
    fn unity_closed_forms_invert_each_other() {
        let gamma = 1.5;
        for zeta in [1e-9, 0.1, 1.0, 7.0] {
            let ou = Unity.omega_u_closed(gamma, zeta).unwrap();
            let eta = gamma / (gamma - 1.0) * zeta * ou;
            let back = Unity.zeta_of_eta_closed(gamma, eta).unwrap();
            assert!((back - zeta).abs() <= 1e-14 * zeta.max(1e-300) * 10.0);
        }
    }
}
