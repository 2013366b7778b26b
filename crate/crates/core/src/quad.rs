//! One-dimensional quadrature helpers.

use crate::error::{Error, Result};

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫_a^b f(u) du` for `0 < a < b` via `u = e^s`.
pub fn simpson_log(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    simpson(
        |s| {
            let u = s.exp();
            let v = f(u) * u;
            if v.is_nan() {
                0.0
            } else {
                v
            }
        },
        a.ln(),
        b.ln(),
        n,
    )
}

/// Composite trapezoid rule on samples `(t, y)`.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if !delta.is_finite() {
            return Err(Error::Accuracy(format!("non-finite integrand near [{a}, {b}]")));
        }
        if delta.abs() <= 15.0 * tol.max(8.0 * f64::EPSILON * (left.abs() + right.abs())) {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Accuracy(format!("adaptive quadrature stalled on [{a}, {b}]")));
        }
        Ok(rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    // split into panels first so narrow features are not missed
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let (f0, f1, fm) = (f(x0), f(x1), f(0.5 * (x0 + x1)));
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += rec(f, x0, x1, f0, fm, f1, whole, tol / panels as f64, 40)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_log() {
        let v = adaptive_simpson(&|x: f64| 1.0 / (1.0 + x), 0.0, 1e6, 1e-12).unwrap();
        assert!((v - (1e6f64).ln_1p()).abs() < 1e-9);
    }

    #[test]
    fn log_substitution() {
        let v = simpson_log(|u| 1.0 / u, 1.0, 1e10, 64);
        assert!((v - 10f64.ln() * 10.0).abs() < 1e-10);
    }
}
