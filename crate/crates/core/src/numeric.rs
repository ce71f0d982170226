//! Small numerical kernels shared by the EOS and the solvers: adaptive
//! Gauss–Kronrod quadrature and a safeguarded Newton–bisection root finder.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("quadrature on [{a}, {b}] did not converge: error estimate {estimate:e} after {intervals} intervals")]
    QuadratureNotConverged {
        a: f64,
        b: f64,
        estimate: f64,
        intervals: usize,
    },
    #[error("non-finite integrand at x = {x}")]
    NonFiniteIntegrand { x: f64 },
    #[error("root finder: no sign change on bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("root finder did not converge on bracket [{lo}, {hi}] after {iterations} iterations")]
    RootNotConverged { lo: f64, hi: f64, iterations: usize },
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, NumericError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(NumericError::NonFiniteIntegrand { x: center });
    }
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !f1.is_finite() || !f2.is_finite() {
            return Err(NumericError::NonFiniteIntegrand { x: center - dx });
        }
        kronrod += w * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate is below `max(abs_tol, rel_tol * |I|)`. The order of bisections
/// is fixed, so results are reproducible bit for bit.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64, NumericError> {
    const MAX_PANELS: usize = 500;
    if a == b {
        return Ok(0.0);
    }
    let mut panels = vec![gk15(&f, a, b)?];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(NumericError::QuadratureNotConverged {
                a,
                b,
                estimate: err,
                intervals: panels.len(),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk15(&f, p.a, mid)?);
        panels.push(gk15(&f, mid, p.b)?);
    }
}

/// Newton iteration kept inside a shrinking bracket; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
///
/// `fdf` returns the function value and its derivative. The bracket
/// `[lo, hi]` must contain a sign change.
pub fn newton_bisect<F, E>(
    mut fdf: F,
    lo: f64,
    hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<(f64, f64), E>,
    E: From<NumericError>,
{
    let (f_lo, _) = fdf(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let (f_hi, _) = fdf(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(NumericError::NoBracket { lo, hi }.into());
    }
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = fdf(x)?;
    for _ in 0..max_iter {
        let newton_leaves = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
        let newton_slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        dx_old = dx;
        if newton_leaves || newton_slow || dfx == 0.0 {
            dx = 0.5 * (pos - neg);
            x = neg + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        if dx.abs() <= x_tol * (1.0 + x.abs()) {
            return Ok(x);
        }
        let (f_new, df_new) = fdf(x)?;
        fx = f_new;
        dfx = df_new;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
    }
    Err(NumericError::RootNotConverged {
        lo: neg.min(pos),
        hi: neg.max(pos),
        iterations: max_iter,
    }
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_polynomial_and_transcendental() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((v - 4.0).abs() < 1e-13);
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-14, 1e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x| 1.0 / (1.0 + x), 0.0, 3.0, 1e-14, 1e-14).unwrap();
        assert!((v - 4f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn quadrature_reversed_and_empty() {
        let v = integrate(|x| x, 1.0, 0.0, 1e-14, 1e-14).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-14, 1e-14).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_reports_non_finite() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-12, 1e-12);
        assert!(err.is_err());
    }

    #[test]
    fn newton_bisect_finds_cube_root() {
        let r: f64 = newton_bisect::<_, NumericError>(|x| Ok((x * x * x - 2.0, 3.0 * x * x)), 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_rejects_missing_bracket() {
        let r = newton_bisect::<_, NumericError>(|x| Ok((x * x + 1.0, 2.0 * x)), -1.0, 1.0, 1e-12, 50);
        assert!(matches!(r, Err(NumericError::NoBracket { .. })));
    }
}
