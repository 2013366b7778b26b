//! Reference 2D incompressible Euler solver in vorticity form
//! `∂_t ω + v·∇ω = 0`, `v = ∇^⊥Δ⁻¹ω`.

use crate::error::{config, precondition, Error, Result};
use crate::funcspaces::{bmo_f_from_profile, log_lipschitz_global, BallSampler, ClassF, OscillationProfile};
use crate::spectral::{advect, biot_savart, grad_linf, SpectralField, VectorField};

/// Vorticity at one instant.
#[derive(Debug, Clone)]
pub struct VorticityState {
    pub omega: SpectralField,
    pub t: f64,
}

impl VorticityState {
    /// Checks the mean-zero invariant.
    pub fn new(omega: SpectralField) -> Result<Self> {
        let scale = omega.linf_norm().max(1.0);
        if omega.mean().abs() > 1e-10 * scale {
            return precondition(format!("vorticity must be mean-zero, mean = {:.3e}", omega.mean()));
        }
        Ok(Self { omega, t: 0.0 })
    }

    pub fn velocity(&self) -> Result<VectorField> {
        biot_savart(&self.omega)
    }
}

fn rhs(omega: &SpectralField) -> Result<SpectralField> {
    let v = biot_savart(omega)?;
    Ok(advect(&v, omega)?.scale(-1.0))
}

/// One RK4 step of length `dt`; dealiased.
pub fn vorticity_step(state: &VorticityState, dt: f64) -> Result<VorticityState> {
    let w = &state.omega;
    let k1 = rhs(w)?;
    let k2 = rhs(&w.axpby(1.0, &k1, 0.5 * dt)?)?;
    let k3 = rhs(&w.axpby(1.0, &k2, 0.5 * dt)?)?;
    let k4 = rhs(&w.axpby(1.0, &k3, dt)?)?;
    let s = k1.add(&k4)?.axpby(1.0, &k2.add(&k3)?, 2.0)?;
    let omega = w.axpby(1.0, &s, dt / 6.0)?;
    let t = state.t + dt;
    if omega.spectral().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::BlowUp { time: t, reason: "non-finite vorticity".into() });
    }
    Ok(VorticityState { omega, t })
}

/// `safety / (k_max ‖v‖_∞)`, capped at `dt_max`.
pub fn vorticity_cfl(state: &VorticityState, safety: f64, dt_max: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return config(format!("dt_safety must lie in (0, 1], got {safety}"));
    }
    let speed = state.velocity()?.linf_norm();
    if speed == 0.0 {
        return Ok(dt_max);
    }
    Ok((safety / (state.omega.grid().k_max_dealiased() * speed)).min(dt_max))
}

/// Options of [`simulate_reference`].
#[derive(Debug, Clone)]
pub struct ReferenceOptions {
    pub dt_safety: f64,
    pub dt_max: f64,
    pub p: f64,
    /// Weight of the BMO_F column.
    pub weight: ClassF,
    /// Record the ball-sampled BMO and BMO_F estimates (costly).
    pub bmo: bool,
    pub keep_snapshots: bool,
    pub blowup_threshold: f64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            dt_safety: 0.5,
            dt_max: 0.05,
            p: 1.5,
            weight: ClassF::one_plus_log(),
            bmo: false,
            keep_snapshots: false,
            blowup_threshold: crate::compressible::BLOWUP_THRESHOLD,
        }
    }
}

/// Norms of the reference solution at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub t: f64,
    pub omega_lp: f64,
    pub omega_l2: f64,
    pub omega_linf: f64,
    /// NaN when not requested.
    pub omega_bmo: f64,
    /// NaN when not requested.
    pub omega_bmo_f: f64,
    pub velocity_ll: f64,
    pub circulation: f64,
}

impl ReferenceSample {
    pub const COLUMNS: [&'static str; 8] =
        ["t", "omega_lp", "omega_l2", "omega_linf", "omega_bmo", "omega_bmo_f", "velocity_ll", "circulation"];

    pub fn values(&self) -> [f64; 8] {
        [
            self.t,
            self.omega_lp,
            self.omega_l2,
            self.omega_linf,
            self.omega_bmo,
            self.omega_bmo_f,
            self.velocity_ll,
            self.circulation,
        ]
    }
}

/// Output of [`simulate_reference`].
#[derive(Debug, Clone)]
pub struct ReferenceRecord {
    pub samples: Vec<ReferenceSample>,
    pub final_state: VorticityState,
    pub snapshots: Vec<VorticityState>,
    pub blow_up: Option<(f64, String)>,
    pub steps: usize,
}

impl ReferenceRecord {
    pub fn outcome(&self) -> Result<()> {
        match &self.blow_up {
            Some((time, reason)) => Err(Error::BlowUp { time: *time, reason: reason.clone() }),
            None => Ok(()),
        }
    }
}

/// Iterates [`vorticity_step`] to `t_final`, sampling every `sample_dt`.
pub fn simulate_reference(
    omega0: &SpectralField,
    t_final: f64,
    sample_dt: f64,
    opts: &ReferenceOptions,
) -> Result<ReferenceRecord> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return config(format!("final time must be positive, got {t_final}"));
    }
    if !(sample_dt > 0.0) {
        return config(format!("sample interval must be positive, got {sample_dt}"));
    }
    let g = omega0.grid();
    let sampler = if opts.bmo {
        if !opts.weight.is_class_f() {
            return precondition(format!("weight {} has not been verified as class F", opts.weight.name()));
        }
        Some(BallSampler::new(g)?)
    } else {
        None
    };
    let record = |st: &VorticityState| -> Result<ReferenceSample> {
        let w = &st.omega;
        let v = st.velocity()?;
        let (bmo, bmo_f) = if let Some(sampler) = &sampler {
            let prof = OscillationProfile::compute(w, sampler)?;
            (prof.bmo(), bmo_f_from_profile(&prof, &opts.weight)?)
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(ReferenceSample {
            t: st.t,
            omega_lp: w.lp_norm(opts.p),
            omega_l2: w.l2_norm(),
            omega_linf: w.linf_norm(),
            omega_bmo: bmo,
            omega_bmo_f: bmo_f,
            velocity_ll: log_lipschitz_global(&v).total(),
            circulation: w.integral(),
        })
    };
    let mut st = VorticityState::new(omega0.dealias())?;
    let mut samples = vec![record(&st)?];
    let mut snapshots = Vec::new();
    if opts.keep_snapshots {
        snapshots.push(st.clone());
    }
    let mut steps = 0;
    let mut blow_up = None;
    let n_samples = (t_final / sample_dt - 1e-9).ceil().max(1.0) as usize;
    'outer: for m in 1..=n_samples {
        let t_next = (m as f64 * sample_dt).min(t_final);
        while st.t < t_next - 1e-12 * t_final.max(1.0) {
            let mut dt = vorticity_cfl(&st, opts.dt_safety, opts.dt_max)?;
            let remaining = t_next - st.t;
            if dt >= remaining || remaining - dt < 0.1 * dt {
                dt = if dt >= remaining { remaining } else { 0.5 * remaining };
            }
            match vorticity_step(&st, dt) {
                Ok(s) => st = s,
                Err(Error::BlowUp { time, reason }) => {
                    blow_up = Some((time, reason));
                    break 'outer;
                }
                Err(e) => return Err(e),
            }
            steps += 1;
            let gv = grad_linf(&st.velocity()?);
            if gv > opts.blowup_threshold {
                blow_up = Some((st.t, format!("‖∇v‖_∞ = {gv:.3e} exceeds {:.1e}", opts.blowup_threshold)));
                break 'outer;
            }
        }
        st.t = t_next;
        samples.push(record(&st)?);
        if opts.keep_snapshots {
            snapshots.push(st.clone());
        }
    }
    Ok(ReferenceRecord { samples, final_state: st, snapshots, blow_up, steps })
}
