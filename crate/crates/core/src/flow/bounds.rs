//! Numerical evaluation of the propagation bound for weighted BMO norms
//! under compressible transport.
//!
//! With `V(t) = ∫₀^t ‖v‖_{LL}`, the bound reads
//! `‖f(t)‖_{BMO_F∩L^p} ≤ C‖f₀‖_{BMO_F∩L^p} e^{C‖div v‖_{L¹_tL^∞}} F(e^{CV})
//!  (1 + F(e^{CV}) ‖div v‖_{L¹_t(LMO_F∩L^∞)})`.
//! The constant in the exponents is fixed at [`BoundOptions::inner_c`]; the
//! prefactor is calibrated once and frozen.

use super::history::VelocityHistory;
use super::map::FlowOptions;
use super::transport::transport_reconstruct;
use crate::error::{config, Error, Result};
use crate::funcspaces::{bmo_f_norm, lmo_f_norm, BallSampler, ClassF};
use crate::spectral::SpectralField;

#[derive(Debug, Clone)]
pub struct BoundOptions {
    pub p: f64,
    pub inner_c: f64,
    pub flow: FlowOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { p: 1.5, inner_c: 1.0, flow: FlowOptions::default() }
    }
}

/// Both sides of the bound at one time, before calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub t: f64,
    /// `‖f(t)‖_{BMO_F} + ‖f(t)‖_{L^p}` of the transported field.
    pub lhs: f64,
    pub data_norm: f64,
    pub div_l1_linf: f64,
    pub ll_integral: f64,
    pub div_l1_lmo: f64,
    /// Right-hand side with unit prefactor.
    pub shape: f64,
}

impl BoundTerms {
    pub const COLUMNS: [&'static str; 7] =
        ["t", "lhs", "data_norm", "div_l1_linf", "ll_integral", "div_l1_lmo", "shape"];

    pub fn values(&self) -> [f64; 7] {
        [self.t, self.lhs, self.data_norm, self.div_l1_linf, self.ll_integral, self.div_l1_lmo, self.shape]
    }
}

/// `a e^{c d} F(e^{cV}) (1 + F(e^{cV}) m)`.
pub fn bound_shape(
    data_norm: f64,
    div_l1_linf: f64,
    ll_integral: f64,
    div_l1_lmo: f64,
    weight: &ClassF,
    c: f64,
) -> f64 {
    let fv = weight.eval_log(c * ll_integral);
    data_norm * (c * div_l1_linf).exp() * fv * (1.0 + fv * div_l1_lmo)
}

/// `‖f‖_{BMO_F} + ‖f‖_{L^p}`.
pub fn bmo_f_lp(f: &SpectralField, weight: &ClassF, p: f64, sampler: &BallSampler) -> Result<f64> {
    Ok(bmo_f_norm(f, weight, sampler)? + f.lp_norm(p))
}

/// Evaluates both sides of the bound at each requested time.
pub fn theorem_bound_eval(
    f0: &SpectralField,
    history: &VelocityHistory,
    weight: &ClassF,
    times: &[f64],
    sampler: &BallSampler,
    opts: &BoundOptions,
) -> Result<Vec<BoundTerms>> {
    if !(opts.p > 1.0) {
        return config(format!("p must exceed 1, got {}", opts.p));
    }
    let data_norm = bmo_f_lp(f0, weight, opts.p, sampler)?;
    let lmo: Vec<f64> = (0..history.times().len())
        .map(|k| {
            let d = history.divergence_frame(k)?;
            Ok(lmo_f_norm(&d, weight, sampler)? + d.linf_norm())
        })
        .collect::<Result<_>>()?;
    times
        .iter()
        .map(|&t| {
            let f = transport_reconstruct(f0, history, t, &opts.flow)?.field;
            let lhs = bmo_f_lp(&f, weight, opts.p, sampler)?;
            let (d, v, m) = (history.div_linf_integral(t), history.ll_integral(t), history.time_integral(&lmo, t));
            Ok(BoundTerms {
                t,
                lhs,
                data_norm,
                div_l1_linf: d,
                ll_integral: v,
                div_l1_lmo: m,
                shape: bound_shape(data_norm, d, v, m, weight, opts.inner_c),
            })
        })
        .collect()
}

/// Prefactor `C = max LHS/shape` at the calibration time over a corpus of
/// runs. Every run must contain the calibration time.
pub fn calibrate(corpus: &[&[BoundTerms]], t_cal: f64) -> Result<f64> {
    let mut c = 0.0f64;
    for run in corpus {
        let term = run
            .iter()
            .find(|b| (b.t - t_cal).abs() <= 1e-9 * t_cal.abs().max(1.0))
            .ok_or_else(|| Error::Range(format!("calibration time {t_cal} missing from a run")))?;
        if term.shape > 0.0 {
            c = c.max(term.lhs / term.shape);
        }
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Accuracy(format!("calibration produced an unusable constant {c}")));
    }
    Ok(c)
}

/// `LHS / (C · shape)` per time.
pub fn calibrated_ratios(terms: &[BoundTerms], c: f64) -> Vec<(f64, f64)> {
    terms.iter().map(|b| (b.t, b.lhs / (c * b.shape))).collect()
}
