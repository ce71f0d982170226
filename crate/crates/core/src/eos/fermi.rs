//! Degenerate relativistic Fermi gas (neutron star matter):
//!
//! ```text
//! P = K c⁵ ∫₀^x q⁴ / √(1+q²) dq,    ρ = 3 K c³ ∫₀^x q² √(1+q²) dq
//! ```
//!
//! At low density `P ≈ ρ^{5/3} / (5 K^{2/3})`, so the gas is an instance of
//! the barotropic law with `γ = 5/3`, `A = 1 / (5 K^{2/3})` and an `Ω` whose
//! Taylor series is obtained here by power-series reversion.

use super::{EosError, EosSpec, PowerSeriesOmega};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Below this Fermi parameter the integrals are summed from their Taylor
/// series; the closed forms cancel catastrophically at small `x`.
const SERIES_CUTOFF: f64 = 0.5;
const SERIES_TERMS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermiEosParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub c: f64,
}

fn binomial_series(exponent: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut b = 1.0;
    for k in 0..n {
        out.push(b);
        b *= (exponent - k as f64) / (k as f64 + 1.0);
    }
    out
}

/// `∫₀^x q⁴ / √(1+q²) dq`
pub fn pressure_integral(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        let s = x * x;
        let b = binomial_series(-0.5, SERIES_TERMS);
        let mut acc = 0.0;
        let mut pow = x.powi(5);
        for (k, bk) in b.iter().enumerate() {
            acc += bk * pow / (2 * k + 5) as f64;
            pow *= s;
        }
        acc
    } else {
        let r = (1.0 + x * x).sqrt();
        (x * (2.0 * x * x - 3.0) * r + 3.0 * x.asinh()) / 8.0
    }
}

/// `∫₀^x q² √(1+q²) dq`
pub fn density_integral(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        let s = x * x;
        let b = binomial_series(0.5, SERIES_TERMS);
        let mut acc = 0.0;
        let mut pow = x.powi(3);
        for (k, bk) in b.iter().enumerate() {
            acc += bk * pow / (2 * k + 3) as f64;
            pow *= s;
        }
        acc
    } else {
        let r = (1.0 + x * x).sqrt();
        (x * (2.0 * x * x + 1.0) * r - x.asinh()) / 8.0
    }
}

/// Density and pressure of the Fermi gas at Fermi parameter `x ≥ 0`.
pub fn fermi_eos(x: f64, params: &FermiEosParams) -> Result<(f64, f64), EosError> {
    if !(x >= 0.0) {
        return Err(EosError::NegativeFermiParameter(x));
    }
    let c3 = params.c.powi(3);
    let rho = 3.0 * params.k * c3 * density_integral(x);
    let p = params.k * c3 * params.c * params.c * pressure_integral(x);
    Ok((rho, p))
}

/// Exact `(ζ, Ω(ζ))` of the Fermi gas at Fermi parameter `x`, independent of
/// `K` and `c`.
pub fn exact_omega(x: f64) -> (f64, f64) {
    let g3 = 3.0 * density_integral(x) / x.powi(3);
    let f5 = 5.0 * pressure_integral(x) / x.powi(5);
    let zeta = x * x * g3.powf(2.0 / 3.0) / 5.0;
    (zeta, f5 / g3.powf(5.0 / 3.0))
}

impl FermiEosParams {
    pub fn new(k: f64, c: f64) -> Result<Self, EosError> {
        if !(k > 0.0) || !(c > 0.0) {
            return Err(EosError::InvalidParameter(format!(
                "Fermi gas needs K > 0 and c > 0 (got K = {k}, c = {c})"
            )));
        }
        Ok(FermiEosParams { k, c })
    }

    /// Low-density polytropic coefficient `A = 1 / (5 K^{2/3})`.
    pub fn polytropic_coefficient(&self) -> f64 {
        1.0 / (5.0 * self.k.powf(2.0 / 3.0))
    }

    /// `(A, γ, Ω)` representation with `Ω` truncated after `order` terms.
    pub fn to_eos(&self, order: usize, delta_omega: f64) -> Result<EosSpec, EosError> {
        let omega = PowerSeriesOmega::from_tail(&omega_taylor(order)[1..]);
        EosSpec::new(self.polytropic_coefficient(), 5.0 / 3.0, self.c, Arc::new(omega))?
            .with_delta_omega(delta_omega)
    }

    /// Fermi parameter of a given density (inverse of the density integral).
    pub fn fermi_parameter(&self, rho: f64) -> Result<f64, EosError> {
        if rho == 0.0 {
            return Ok(0.0);
        }
        if !(rho > 0.0) {
            return Err(EosError::NegativeDensity(rho));
        }
        let target = rho / (3.0 * self.k * self.c.powi(3));
        let mut hi = (3.0 * target).cbrt().max(1e-300);
        while density_integral(hi) < target {
            hi *= 2.0;
        }
        crate::numeric::newton_bisect(
            |x| Ok((density_integral(x) - target, x * x * (1.0 + x * x).sqrt())),
            0.0,
            hi,
            1e-16,
            200,
        )
    }
}

fn series_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

// a^p for a series with a[0] = 1 (J. C. P. Miller recurrence)
fn series_pow(a: &[f64], p: f64, n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n];
    b[0] = 1.0;
    for m in 1..n {
        let mut acc = 0.0;
        for k in 1..=m.min(a.len() - 1) {
            acc += (p * k as f64 - (m - k) as f64) * a[k] * b[m - k];
        }
        b[m] = acc / m as f64;
    }
    b
}

// outer(inner(x)), inner[0] == 0
fn series_compose(outer: &[f64], inner: &[f64], n: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n];
    for &c in outer.iter().take(n).rev() {
        acc = series_mul(&acc, inner, n);
        acc[0] += c;
    }
    acc
}

/// Taylor coefficients `[1, ω₁, …, ω_{order}]` of the Fermi-gas `Ω(ζ)`.
///
/// With `s = x²`: `ζ = s G(s)^{2/3} / 5` and `Ω = F(s) G(s)^{-5/3}`, where
/// `G = 3 ∫q²√(1+q²)/x³` and `F = 5 ∫q⁴/√(1+q²)/x⁵`. The relation `ζ(s)` is
/// reverted by fixed-point iteration on truncated series.
pub fn omega_taylor(order: usize) -> Vec<f64> {
    let n = order + 1;
    let g: Vec<f64> = binomial_series(0.5, n)
        .iter()
        .enumerate()
        .map(|(k, b)| 3.0 * b / (2 * k + 3) as f64)
        .collect();
    let f: Vec<f64> = binomial_series(-0.5, n)
        .iter()
        .enumerate()
        .map(|(k, b)| 5.0 * b / (2 * k + 5) as f64)
        .collect();
    // s = 5 ζ W(s), W = G^{-2/3}
    let w = series_pow(&g, -2.0 / 3.0, n);
    let mut s = vec![0.0; n];
    for _ in 0..=n {
        let ws = series_compose(&w, &s, n);
        let mut next = vec![0.0; n];
        for k in 1..n {
            next[k] = 5.0 * ws[k - 1];
        }
        s = next;
    }
    let e = series_mul(&f, &series_pow(&g, -5.0 / 3.0, n), n);
    series_compose(&e, &s, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_leading_coefficient() {
        // Ω ≈ 1 - (5/14 + 1/2)·5ζ
        let w = omega_taylor(6);
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!((w[1] + 30.0 / 7.0).abs() < 1e-13, "{}", w[1]);
    }

    #[test]
    fn taylor_matches_exact_parametric_omega() {
        let w = omega_taylor(14);
        let om = PowerSeriesOmega::from_tail(&w[1..]);
        use super::super::Omega;
        for x in [0.01, 0.05, 0.1, 0.2] {
            let (zeta, exact) = exact_omega(x);
            let approx = om.value(zeta);
            assert!(((approx - exact) / exact).abs() < 1e-10, "x={x}: {approx} vs {exact}");
        }
    }

    #[test]
    fn series_and_closed_forms_agree_at_cutoff() {
        let x = SERIES_CUTOFF;
        let r = (1.0 + x * x).sqrt();
        let p_closed = (x * (2.0 * x * x - 3.0) * r + 3.0 * x.asinh()) / 8.0;
        let d_closed = (x * (2.0 * x * x + 1.0) * r - x.asinh()) / 8.0;
        let p_series = pressure_integral(x * (1.0 - 1e-15));
        let d_series = density_integral(x * (1.0 - 1e-15));
        assert!(((p_series - p_closed) / p_closed).abs() < 1e-12);
        assert!(((d_series - d_closed) / d_closed).abs() < 1e-12);
    }

    #[test]
    fn fermi_parameter_round_trip() {
        let params = FermiEosParams::new(2.0, 1.0).unwrap();
        for x in [1e-4, 0.3, 1.0, 3.0] {
            let (rho, _) = fermi_eos(x, &params).unwrap();
            let back = params.fermi_parameter(rho).unwrap();
            assert!(((back - x) / x).abs() < 1e-12);
        }
    }
}
