//! Strang-split time stepping: half acoustic step, RK4 on the nonlinear
//! terms, half acoustic step.

use super::acoustic::acoustic_propagator;
use super::state::CompressibleState;
use crate::error::{config, Error, Result};
use crate::spectral::{grad_linf, partial, SpectralField, VectorField};

/// Default blow-up threshold on `‖∇v‖_∞`.
pub const BLOWUP_THRESHOLD: f64 = 1e4;

/// Knobs of a single step.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    /// Whether the nonlinear substep runs; off gives the linear system.
    pub nonlinear: bool,
    pub blowup_threshold: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { nonlinear: true, blowup_threshold: BLOWUP_THRESHOLD }
    }
}

/// `f_ε = −v·∇v − γ̄c∇c` and `g_ε = −v·∇c − γ̄c div v`, dealiased.
pub fn nonlinear_rhs(state: &CompressibleState) -> (VectorField, SpectralField) {
    nonlinear_terms(&state.v, &state.c, state.gamma_bar)
}

fn nonlinear_terms(v: &VectorField, c: &SpectralField, gamma_bar: f64) -> (VectorField, SpectralField) {
    let g = c.grid();
    let d = [partial(&v.v1, 0), partial(&v.v1, 1), partial(&v.v2, 0), partial(&v.v2, 1), partial(c, 0), partial(c, 1)];
    let (a, b, cc) = (v.v1.physical(), v.v2.physical(), c.physical());
    let dp: Vec<&[f64]> = d.iter().map(SpectralField::physical).collect();
    let n = g.len();
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    let mut gg = vec![0.0; n];
    for i in 0..n {
        let (v1, v2, ci) = (a[i], b[i], cc[i]);
        let (d11, d21, d12, d22, c1, c2) = (dp[0][i], dp[1][i], dp[2][i], dp[3][i], dp[4][i], dp[5][i]);
        f1[i] = -(v1 * d11 + v2 * d21) - gamma_bar * ci * c1;
        f2[i] = -(v1 * d12 + v2 * d22) - gamma_bar * ci * c2;
        gg[i] = -(v1 * c1 + v2 * c2) - gamma_bar * ci * (d11 + d22);
    }
    (
        VectorField {
            v1: SpectralField::from_physical_unchecked(g, f1).dealias(),
            v2: SpectralField::from_physical_unchecked(g, f2).dealias(),
        },
        SpectralField::from_physical_unchecked(g, gg).dealias(),
    )
}

/// `dt = safety / (k_max (‖v‖_∞ + γ̄‖c‖_∞))`, capped at `dt_max`. The wave
/// speed `1/ε` does not enter since the acoustic part is integrated exactly.
pub fn cfl_dt(state: &CompressibleState, safety: f64, dt_max: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return config(format!("dt_safety must lie in (0, 1], got {safety}"));
    }
    let speed = state.v.linf_norm() + state.gamma_bar.abs() * state.c.linf_norm();
    let k = state.grid().k_max_dealiased();
    if speed == 0.0 {
        return Ok(dt_max);
    }
    Ok((safety / (k * speed)).min(dt_max))
}

fn rk4(v: &VectorField, c: &SpectralField, gb: f64, dt: f64) -> Result<(VectorField, SpectralField)> {
    let (k1v, k1c) = nonlinear_terms(v, c, gb);
    let (k2v, k2c) = nonlinear_terms(&v.axpby(1.0, &k1v, 0.5 * dt)?, &c.axpby(1.0, &k1c, 0.5 * dt)?, gb);
    let (k3v, k3c) = nonlinear_terms(&v.axpby(1.0, &k2v, 0.5 * dt)?, &c.axpby(1.0, &k2c, 0.5 * dt)?, gb);
    let (k4v, k4c) = nonlinear_terms(&v.axpby(1.0, &k3v, dt)?, &c.axpby(1.0, &k3c, dt)?, gb);
    let sv = k1v.add(&k4v)?.axpby(1.0, &k2v.add(&k3v)?, 2.0)?;
    let sc = k1c.add(&k4c)?.axpby(1.0, &k2c.add(&k3c)?, 2.0)?;
    Ok((v.axpby(1.0, &sv, dt / 6.0)?, c.axpby(1.0, &sc, dt / 6.0)?))
}

/// One Strang step of length `dt` (negative `dt` integrates backwards).
pub fn step_with(state: &CompressibleState, dt: f64, opts: StepOptions) -> Result<CompressibleState> {
    let half = acoustic_propagator(state, 0.5 * dt);
    let mid = if opts.nonlinear {
        let (v, c) = rk4(&half.v, &half.c, state.gamma_bar, dt)?;
        half.with_fields(v, c)
    } else {
        half
    };
    let mut out = acoustic_propagator(&mid, 0.5 * dt);
    out.t = state.t + dt;
    let time = out.t;
    let bad = out
        .v
        .v1
        .spectral()
        .iter()
        .chain(out.v.v2.spectral())
        .chain(out.c.spectral())
        .any(|z| !z.re.is_finite() || !z.im.is_finite());
    if bad {
        return Err(Error::BlowUp { time, reason: "non-finite value".into() });
    }
    let gv = grad_linf(&out.v);
    if gv > opts.blowup_threshold {
        return Err(Error::BlowUp {
            time, reason: format!("‖∇v‖_∞ = {gv:.3e} exceeds {:.1e}", opts.blowup_threshold)
        });
    }
    Ok(out)
}

/// One Strang step with the nonlinearity on and the default threshold.
pub fn step(state: &CompressibleState, dt: f64) -> Result<CompressibleState> {
    step_with(state, dt, StepOptions::default())
}
