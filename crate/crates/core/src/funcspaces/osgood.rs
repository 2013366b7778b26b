//! Osgood functionals `M(x) = ∫₀^x dy / F(e^{Cy})`, their inverses, and
//! the Osgood comparison bound.

use super::weight::ClassF;
use crate::error::{precondition, Error, Result};
use crate::quad::{adaptive_simpson, trapezoid};

/// Quantity requested from [`osgood_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsgoodQuery {
    M,
    MInverse,
    MInverseDerivative,
}

/// Largest `x` for which `M⁻¹` is searched.
pub const M_INVERSE_LIMIT: f64 = 1e12;

const TOL: f64 = 1e-13;

/// `M(x)`.
pub fn osgood_m(weight: &ClassF, c: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Range(format!("M is defined for x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // integrate on dyadic pieces so the relative tolerance holds at large x
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = x.min(1.0);
    loop {
        let piece = adaptive_simpson(&|y| 1.0 / weight.eval_log(c * y), a, b, TOL * (b - a).max(1e-300))?;
        total += piece;
        if b >= x {
            break;
        }
        a = b;
        b = (2.0 * b).min(x);
    }
    Ok(total)
}

/// `M⁻¹(t)` by bracketing and bisection on the increasing `M`.
pub fn osgood_m_inverse(weight: &ClassF, c: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Range(format!("M⁻¹ is defined for t ≥ 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut m_lo = 0.0;
    let mut hi = 1.0;
    let mut m_hi = osgood_m(weight, c, hi)?;
    while m_hi < t {
        if hi >= M_INVERSE_LIMIT {
            return Err(Error::Range(format!(
                "M⁻¹({t}) lies beyond the computed range M({M_INVERSE_LIMIT:e}) = {m_hi}"
            )));
        }
        lo = hi;
        m_lo = m_hi;
        hi *= 2.0;
        // M(hi) = M(lo) + ∫_lo^hi, avoiding recomputation from 0
        m_hi = m_lo + adaptive_simpson(&|y| 1.0 / weight.eval_log(c * y), lo, hi, TOL * (hi - lo))?;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let m_mid = m_lo + adaptive_simpson(&|y| 1.0 / weight.eval_log(c * y), lo, mid, TOL * (mid - lo).max(1e-300))?;
        if m_mid < t {
            lo = mid;
            m_lo = m_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evaluates `M`, `M⁻¹` or `(M⁻¹)′ = F(e^{C M⁻¹})`.
pub fn osgood_solve(weight: &ClassF, c: f64, x_or_t: f64, query: OsgoodQuery) -> Result<f64> {
    if !weight.is_class_f() {
        return precondition(format!("weight {} has not been verified as class F", weight.name()));
    }
    if !(c > 0.0) {
        return precondition(format!("Osgood constant must be positive, got {c}"));
    }
    match query {
        OsgoodQuery::M => osgood_m(weight, c, x_or_t),
        OsgoodQuery::MInverse => osgood_m_inverse(weight, c, x_or_t),
        OsgoodQuery::MInverseDerivative => {
            let x = osgood_m_inverse(weight, c, x_or_t)?;
            Ok(weight.eval_log(c * x))
        }
    }
}

/// Osgood bound `ρ(t) ≤ 𝓜⁻¹(𝓜(C) + ∫₀^t γ)` for `ρ ≤ C + ∫ γ μ(ρ)`, where
/// `𝓜(y) = ∫_C^y dx/μ(x)`. `gamma` holds samples `(τ, γ(τ))` from 0 up to at
/// least `t`; `μ` must be positive and nondecreasing on `[C, ∞)`.
pub fn osgood_bound(c: f64, gamma: &[(f64, f64)], mu: impl Fn(f64) -> f64, t: f64) -> Result<f64> {
    if !(c > 0.0) {
        return precondition(format!("Osgood bound needs C > 0, got {c}"));
    }
    let (ts, gs): (Vec<f64>, Vec<f64>) = gamma.iter().copied().filter(|&(s, _)| s <= t).unzip();
    let mut target = if ts.len() >= 2 { trapezoid(&ts, &gs) } else { 0.0 };
    if let (Some(&last), Some(&(s_next, g_next))) = (ts.last(), gamma.iter().find(|&&(s, _)| s > t)) {
        // partial last interval, linear interpolation of γ
        let g_last = *gs.last().unwrap();
        let g_t = g_last + (g_next - g_last) * (t - last) / (s_next - last);
        target += 0.5 * (t - last) * (g_last + g_t);
    }
    if target <= 0.0 {
        return Ok(c);
    }
    // ∫_{ln C}^{ln y} e^u/μ(e^u) du, increasing in y
    let integrand = |u: f64| u.exp() / mu(u.exp());
    let m_of = |a: f64, b: f64| adaptive_simpson(&integrand, a, b, TOL * (b - a).abs().max(1e-300));
    let mut lo = c.ln();
    let mut m_lo = 0.0;
    let mut hi = lo + 1.0;
    let mut m_hi = m_of(lo, hi)?;
    while m_hi < target {
        if hi > 690.0 {
            return Err(Error::Range(format!("Osgood bound exceeds e^690 (target {target})")));
        }
        lo = hi;
        m_lo = m_hi;
        hi = lo + 1.0;
        m_hi = m_lo + m_of(lo, hi)?;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let m_mid = m_lo + m_of(lo, mid)?;
        if m_mid < target {
            lo = mid;
            m_lo = m_mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_for_one_plus_log() {
        let f = ClassF::one_plus_log();
        for c in [0.5, 1.0, 3.0] {
            for x in [0.0, 0.1, 1.0, 10.0, 1e4] {
                let m = osgood_solve(&f, c, x, OsgoodQuery::M).unwrap();
                let exact = (c * x).ln_1p() / c;
                assert!((m - exact).abs() <= 1e-8 * exact.max(1.0), "c={c} x={x}");
            }
            for t in [0.0, 0.5, 2.0, 5.0] {
                let xi = osgood_solve(&f, c, t, OsgoodQuery::MInverse).unwrap();
                let exact = ((c * t).exp() - 1.0) / c;
                assert!((xi - exact).abs() <= 1e-8 * exact.max(1.0));
                let d = osgood_solve(&f, c, t, OsgoodQuery::MInverseDerivative).unwrap();
                assert!((d - (c * t).exp()).abs() <= 1e-8 * d);
            }
        }
    }

    #[test]
    fn inverse_out_of_range() {
        let f = ClassF::one_plus_log();
        assert!(matches!(osgood_solve(&f, 1.0, 100.0, OsgoodQuery::MInverse), Err(Error::Range(_))));
    }

    #[test]
    fn gronwall_case() {
        let gamma: Vec<(f64, f64)> = (0..=100).map(|i| (i as f64 * 0.01, 1.0 + i as f64 * 0.01)).collect();
        let b = osgood_bound(2.0, &gamma, |x| x, 1.0).unwrap();
        assert!((b - 2.0 * 1.5f64.exp()).abs() < 1e-8 * b);
        let zero: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        assert_eq!(osgood_bound(2.0, &zero, |x| x, 5.0).unwrap(), 2.0);
    }
}
