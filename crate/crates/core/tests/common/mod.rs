//! Oracles shared by the integration tests.

#![allow(dead_code)]

/// Fixed-step RK4 for the Lane–Emden equation, started from the series
/// `θ = 1 − R²/6 + μR⁴/120`; the zero is located by cubic Hermite
/// interpolation over the crossing step.
pub fn rk4_first_zero(mu: f64, h: f64) -> f64 {
    let pow = |t: f64| if t > 0.0 { t.powf(mu) } else { 0.0 };
    let f = |r: f64, y: [f64; 2]| [y[1], -pow(y[0]) - 2.0 * y[1] / r];
    let mut r: f64 = 1e-2;
    let mut y = [1.0 - r * r / 6.0 + mu * r.powi(4) / 120.0, -r / 3.0 + mu * r.powi(3) / 30.0];
    loop {
        let k1 = f(r, y);
        let k2 = f(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0] <= 0.0 {
            let herm = |s: f64| {
                let (s2, s3) = (s * s, s * s * s);
                (2.0 * s3 - 3.0 * s2 + 1.0) * y[0]
                    + (s3 - 2.0 * s2 + s) * h * y[1]
                    + (-2.0 * s3 + 3.0 * s2) * next[0]
                    + (s3 - s2) * h * next[1]
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if herm(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return r + h * lo;
        }
        y = next;
        r += h;
    }
}

pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, 1e-15).integral
}
