//! Sampled BMO-type, log-Lipschitz and interpolation estimates.

use rayon::prelude::*;

use super::sampler::{BallSampler, OscillationProfile};
use super::weight::ClassF;
use crate::error::{precondition, Result};
use crate::spectral::{SpectralField, VectorField};

fn require_class_f(f: &ClassF) -> Result<()> {
    if !f.is_class_f() {
        return precondition(format!("weight {} has not been verified as class F", f.name()));
    }
    Ok(())
}

/// `max_B ⨍_B |f − ⨍_B f|` over the sampled balls.
pub fn bmo_norm(f: &SpectralField, sampler: &BallSampler) -> Result<f64> {
    Ok(OscillationProfile::compute(f, sampler)?.bmo())
}

/// Weighted nested-gap term `max |⨍_{B₂}f − ⨍_{B₁}f| / F((1−ln r₂)/(1−ln r₁))`.
pub fn bmo_f_gap(profile: &OscillationProfile, weight: &ClassF) -> f64 {
    profile.gaps.iter().map(|&(r1, r2, gap)| gap / weight.eval((1.0 - r2.ln()) / (1.0 - r1.ln()))).fold(0.0, f64::max)
}

/// `BMO_F` norm from a precomputed profile.
pub fn bmo_f_from_profile(profile: &OscillationProfile, weight: &ClassF) -> Result<f64> {
    require_class_f(weight)?;
    Ok(profile.bmo() + bmo_f_gap(profile, weight))
}

pub fn bmo_f_norm(f: &SpectralField, weight: &ClassF, sampler: &BallSampler) -> Result<f64> {
    require_class_f(weight)?;
    bmo_f_from_profile(&OscillationProfile::compute(f, sampler)?, weight)
}

/// `LMO_F` norm from a precomputed profile.
pub fn lmo_f_from_profile(profile: &OscillationProfile, weight: &ClassF) -> Result<f64> {
    require_class_f(weight)?;
    let osc = profile.radii.iter().zip(&profile.osc).map(|(&r, &o)| weight.eval(1.0 - r.ln()) * o).fold(0.0, f64::max);
    let gap = profile.gaps.iter().map(|&(r1, _, g)| weight.eval(1.0 - r1.ln()) * g).fold(0.0, f64::max);
    Ok(osc + gap)
}

pub fn lmo_f_norm(f: &SpectralField, weight: &ClassF, sampler: &BallSampler) -> Result<f64> {
    require_class_f(weight)?;
    lmo_f_from_profile(&OscillationProfile::compute(f, sampler)?, weight)
}

/// Log-Lipschitz estimate split into its quotient and `L^∞` parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLipschitz {
    /// `max |v(x) − v(y)| / (|x−y| ln(e/|x−y|))` over sampled pairs.
    pub quotient: f64,
    pub linf: f64,
}

impl LogLipschitz {
    pub fn total(&self) -> f64 {
        self.quotient + self.linf
    }
}

/// Samples the log-Lipschitz quotient over all grid points (inside the
/// sampler window) paired with their shifts by `s·(1,0), s·(0,1), s·(1,±1)`
/// for dyadic `s` with `|x − y| < 1`.
pub fn log_lipschitz_norm(v: &VectorField, sampler: &BallSampler) -> Result<LogLipschitz> {
    if sampler.grid() != v.grid() {
        return crate::error::config("field grid does not match sampler grid");
    }
    Ok(log_lipschitz_sampled(v, Some(sampler)))
}

/// [`log_lipschitz_norm`] over every grid point, without a window.
pub fn log_lipschitz_global(v: &VectorField) -> LogLipschitz {
    log_lipschitz_sampled(v, None)
}

fn log_lipschitz_sampled(v: &VectorField, sampler: Option<&BallSampler>) -> LogLipschitz {
    let g = v.grid();
    let n = g.n();
    let h = g.spacing();
    let (a, b) = (v.v1.physical(), v.v2.physical());
    let mut shifts = Vec::new();
    let mut s = 1usize;
    while s < n / 2 {
        for (di, dj) in [(s as i64, 0i64), (0, s as i64), (s as i64, s as i64), (s as i64, -(s as i64))] {
            let d = h * ((di * di + dj * dj) as f64).sqrt();
            if d < 1.0 {
                shifts.push((di, dj, d, d * (1f64.exp() / d).ln()));
            }
        }
        s *= 2;
    }
    let quotient = (0..g.len())
        .into_par_iter()
        .filter(|&idx| {
            sampler.is_none_or(|s| s.window().is_none() || s.in_window((g.coord(idx / n), g.coord(idx % n))))
        })
        .map(|idx| {
            let (i, j) = ((idx / n) as i64, (idx % n) as i64);
            let mut m = 0.0f64;
            for &(di, dj, _, w) in &shifts {
                let k = ((i + di).rem_euclid(n as i64) as usize) * n + (j + dj).rem_euclid(n as i64) as usize;
                let dv = (a[k] - a[idx]).hypot(b[k] - b[idx]);
                m = m.max(dv / w);
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    LogLipschitz { quotient, linf: v.linf_norm() }
}

/// `‖f‖_{L^q} / (‖f‖_{L^p}^{p/q} ‖f‖_{BMO}^{1−p/q})`.
pub fn interpolation_check(f: &SpectralField, p: f64, q: f64, sampler: &BallSampler) -> Result<f64> {
    if !(p >= 1.0 && p <= q && q.is_finite()) {
        return precondition(format!("interpolation needs 1 ≤ p ≤ q < ∞, got p = {p}, q = {q}"));
    }
    let bmo = bmo_norm(f, sampler)?;
    if bmo == 0.0 {
        return precondition("field has zero sampled BMO seminorm (constant modulo the sampler)");
    }
    let lp = f.lp_norm(p);
    Ok(f.lp_norm(q) / (lp.powf(p / q) * bmo.powf(1.0 - p / q)))
}
