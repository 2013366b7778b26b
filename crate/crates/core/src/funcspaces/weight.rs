//! Admissible weights `F` and their numerical classification.

use std::fmt;
use std::sync::Arc;

use crate::quad::{simpson, simpson_log};

/// Shape of a weight, evaluated through `u ↦ F(e^u)` so that huge
/// arguments stay representable.
#[derive(Clone)]
pub enum WeightKind {
    /// `1 + ln^α x`.
    OnePlusLogPow(f64),
    /// `x^β`.
    Power(f64),
    /// `1 + ln ln(e + x)·ln x`.
    OnePlusLogLogTimesLog,
    /// User supplied `u ↦ F(e^u)` with a name tag.
    Custom(String, Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OnePlusLogPow(a) => write!(f, "OnePlusLogPow({a})"),
            Self::Power(b) => write!(f, "Power({b})"),
            Self::OnePlusLogLogTimesLog => write!(f, "OnePlusLogLogTimesLog"),
            Self::Custom(name, _) => write!(f, "Custom({name})"),
        }
    }
}

/// Weight function `F: [1, ∞) → [1, ∞)` with its verification flags.
#[derive(Debug, Clone)]
pub struct ClassF {
    kind: WeightKind,
    is_class_f: bool,
    is_class_f_prime: bool,
    constant: f64,
}

impl ClassF {
    /// Unverified weight; flags are false until [`verify_class_f`] runs.
    pub fn new(kind: WeightKind) -> Self {
        Self { kind, is_class_f: false, is_class_f_prime: false, constant: f64::NAN }
    }

    /// Weight with flags set by the default verification budget.
    pub fn verified(kind: WeightKind) -> Self {
        let mut f = Self::new(kind);
        let report = verify_class_f(&f, VerifyBudget::default());
        f.apply(&report);
        f
    }

    /// `1 + ln`, the weight of LBMO.
    pub fn one_plus_log() -> Self {
        Self::verified(WeightKind::OnePlusLogPow(1.0))
    }

    pub fn apply(&mut self, report: &ClassFReport) {
        self.is_class_f = report.is_class_f;
        self.is_class_f_prime = report.is_class_f_prime;
        self.constant = report.asymptotic_worst.max(report.submultiplicative_worst);
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            WeightKind::OnePlusLogPow(_) => "one_plus_log_alpha".into(),
            WeightKind::Power(_) => "power_beta".into(),
            WeightKind::OnePlusLogLogTimesLog => "one_plus_loglog_log".into(),
            WeightKind::Custom(name, _) => name.clone(),
        }
    }

    pub fn is_class_f(&self) -> bool {
        self.is_class_f
    }

    pub fn is_class_f_prime(&self) -> bool {
        self.is_class_f_prime
    }

    /// Largest constant measured by the last verification.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `F(e^u)` for `u ≥ 0`.
    pub fn eval_log(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        match &self.kind {
            WeightKind::OnePlusLogPow(a) => 1.0 + u.powf(*a),
            WeightKind::Power(b) => (b * u).exp(),
            WeightKind::OnePlusLogLogTimesLog => {
                // ln(e + e^u) without overflow
                let l = if u > 1.0 { u + (1.0 - u).exp().ln_1p() } else { (1f64.exp() + u.exp()).ln() };
                1.0 + l.ln() * u
            }
            WeightKind::Custom(_, f) => f(u),
        }
    }

    /// `ln F(e^u)`, exact for power weights whose values overflow.
    pub fn ln_eval_log(&self, u: f64) -> f64 {
        match &self.kind {
            WeightKind::Power(b) => b * u.max(0.0),
            _ => self.eval_log(u).ln(),
        }
    }

    /// `F(x)` for `x ≥ 1`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_log(x.max(1.0).ln())
    }
}

/// Lattice sizes used by [`verify_class_f`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyBudget {
    /// Decades of `λ` and `x/λ` probed for the asymptotic condition.
    pub asymptotic_decades: usize,
    /// Decades of `ln x` and `ln y` probed for submultiplicativity.
    pub submult_decades: usize,
    /// Decades of `ln x` scanned for the Osgood integral.
    pub osgood_decades: usize,
}

impl Default for VerifyBudget {
    fn default() -> Self {
        Self { asymptotic_decades: 12, submult_decades: 200, osgood_decades: 300 }
    }
}

/// Outcome of [`verify_class_f`] with worst-case witnesses.
#[derive(Debug, Clone)]
pub struct ClassFReport {
    pub at_least_one: bool,
    pub blows_up: bool,
    pub asymptotic_bounded: bool,
    /// Largest `∫_x^∞ e^{−y/λ}F(y)dy / (λ e^{−x/λ}F(x))` found, and its `(λ, x)`.
    pub asymptotic_worst: f64,
    pub asymptotic_witness: (f64, f64),
    pub submultiplicative: bool,
    /// Largest `F(xy)/(F(x)F(y))` found, and its `(ln x, ln y)`.
    pub submultiplicative_worst: f64,
    pub submultiplicative_witness: (f64, f64),
    pub osgood_divergent: bool,
    /// Decade increments `∫_{10^j}^{10^{j+1}} du/F(e^u)` used for the Osgood test.
    pub osgood_increments: Vec<f64>,
    pub is_class_f: bool,
    pub is_class_f_prime: bool,
}

/// A bounded quantity sampled on a growing lattice is declared bounded if
/// the supremum over the outer half stays within twice the supremum over
/// the inner half.
fn saturates(inner: f64, outer: f64) -> bool {
    inner.is_finite() && outer.is_finite() && outer <= 2.0 * inner.max(1.0)
}

/// Numerically tests the defining properties of the weight classes.
pub fn verify_class_f(f: &ClassF, budget: VerifyBudget) -> ClassFReport {
    let at_least_one = (0..=600).all(|i| f.eval_log(i as f64 * 0.5) >= 1.0 - 1e-12);

    // blow-up: F(10^k) strictly increasing for k up to 300
    let samples: Vec<f64> = (0..=300).map(|k| f.ln_eval_log(k as f64 * std::f64::consts::LN_10)).collect();
    let blows_up = samples.windows(2).all(|w| w[1] > w[0]);

    // asymptotic condition for λ ≥ 1, x ≥ λ, written as ∫₀^∞ e^{−u} F(x+λu)/F(x) du
    let half = budget.asymptotic_decades;
    let mut inner = 0.0f64;
    let mut outer = 0.0f64;
    let mut worst = 0.0f64;
    let mut witness = (1.0, 1.0);
    for i in 0..=2 * half {
        for j in 0..=2 * half {
            let lambda = 10f64.powf(i as f64 * 0.5);
            let x = lambda * 10f64.powf(j as f64 * 0.5);
            let lfx = f.ln_eval_log(x.ln());
            let r = simpson(
                |u| {
                    let v = (f.ln_eval_log((x + lambda * u).ln()) - lfx - u).exp();
                    if v.is_nan() {
                        f64::INFINITY
                    } else {
                        v
                    }
                },
                0.0,
                60.0,
                4000,
            );
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if i.max(j) <= half {
                inner = inner.max(r);
            } else {
                outer = outer.max(r);
            }
            if !(r <= worst) {
                worst = r;
                witness = (lambda, x);
            }
        }
    }
    let asymptotic_bounded = saturates(inner, outer);

    // submultiplicativity on a lattice of ln x, ln y
    let u_max = budget.submult_decades as f64 * std::f64::consts::LN_10;
    let steps = ((u_max.log10() + 2.0) * 16.0).floor() as usize;
    let lattice: Vec<f64> =
        std::iter::once(0.0).chain((0..=steps).map(|i| 10f64.powf(i as f64 / 16.0 - 2.0))).collect();
    let cut = u_max / 100.0;
    let (mut s_inner, mut s_outer, mut s_worst) = (0.0f64, 0.0f64, 0.0f64);
    let mut s_witness = (0.0, 0.0);
    for &a in &lattice {
        for &b in &lattice {
            let r = (f.ln_eval_log(a + b) - f.ln_eval_log(a) - f.ln_eval_log(b)).exp();
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if a.max(b) <= cut {
                s_inner = s_inner.max(r);
            } else {
                s_outer = s_outer.max(r);
            }
            if !(r <= s_worst) {
                s_worst = r;
                s_witness = (a, b);
            }
        }
    }
    let submultiplicative = saturates(s_inner, s_outer);

    // Osgood: ∫₁^∞ dx/(xF(x)) = ∫₀^∞ du/F(e^u), summed by decades of u
    let increments: Vec<f64> = (0..budget.osgood_decades)
        .map(|j| {
            let (a, b) = (10f64.powi(j as i32), 10f64.powi(j as i32 + 1));
            simpson_log(|u| 1.0 / f.eval_log(u), a, b, 64)
        })
        .collect();
    let jm = increments.len() - 1;
    let jh = jm / 2;
    let tail = jm as f64 * increments[jm];
    let mid = jh as f64 * increments[jh];
    let osgood_divergent = tail > 0.0 && tail.is_finite() && tail >= 0.75 * mid;

    let is_class_f = at_least_one && blows_up && asymptotic_bounded && submultiplicative;
    ClassFReport {
        at_least_one,
        blows_up,
        asymptotic_bounded,
        asymptotic_worst: worst,
        asymptotic_witness: witness,
        submultiplicative,
        submultiplicative_worst: s_worst,
        submultiplicative_witness: s_witness,
        osgood_divergent,
        osgood_increments: increments,
        is_class_f,
        is_class_f_prime: is_class_f && osgood_divergent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_powers_are_osgood() {
        for a in [0.25, 0.5, 1.0] {
            let f = ClassF::verified(WeightKind::OnePlusLogPow(a));
            assert!(f.is_class_f() && f.is_class_f_prime(), "alpha = {a}");
        }
        let f = ClassF::verified(WeightKind::OnePlusLogLogTimesLog);
        assert!(f.is_class_f() && f.is_class_f_prime());
    }

    #[test]
    fn powers_are_not_osgood() {
        for b in [0.1, 0.5, 2.0] {
            let f = ClassF::verified(WeightKind::Power(b));
            assert!(f.is_class_f(), "beta = {b}");
            assert!(!f.is_class_f_prime(), "beta = {b}");
        }
    }

    #[test]
    fn exponential_is_rejected() {
        let f = ClassF::verified(WeightKind::Custom("exp".into(), Arc::new(|u: f64| u.exp().exp())));
        assert!(!f.is_class_f());
        let bounded = ClassF::verified(WeightKind::Custom("const".into(), Arc::new(|_| 2.0)));
        assert!(!bounded.is_class_f());
    }

    #[test]
    fn borderline_convergent_is_not_prime() {
        // ∫ du/(u ln² u) converges
        let f =
            ClassF::verified(WeightKind::Custom("log_sq".into(), Arc::new(|u: f64| 1.0 + u * (1.0 + u).ln().powi(2))));
        assert!(f.is_class_f());
        assert!(!f.is_class_f_prime());
    }

    #[test]
    fn evaluation_matches_formulas() {
        let f = ClassF::new(WeightKind::OnePlusLogLogTimesLog);
        let x: f64 = 50.0;
        let expect = 1.0 + (1f64.exp() + x).ln().ln() * x.ln();
        assert!((f.eval(x) - expect).abs() < 1e-12);
        let g = ClassF::new(WeightKind::Power(0.5));
        assert!((g.eval(16.0) - 4.0).abs() < 1e-12);
    }
}
