//! Time integration with per-sample diagnostics and running accumulators.

use super::acoustic::gamma_upsilon;
use super::solver::{cfl_dt, step_with, StepOptions, BLOWUP_THRESHOLD};
use super::state::CompressibleState;
use crate::error::{config, Error, Result};
use crate::funcspaces::{bmo_norm, log_lipschitz_global, BallSampler};
use crate::littlewood_paley::DyadicPartition;
use crate::spectral::{curl2d, divergence, grad_linf, gradient, leray_q, SpectralField};

/// Options of [`simulate`].
#[derive(Debug, Clone)]
pub struct SimulationOptions {
    pub dt_safety: f64,
    pub dt_max: f64,
    /// Optional extra cap `dt ≤ factor·ε` for accuracy of the splitting
    /// at small Mach numbers; `None` leaves dt set by the CFL rule only.
    pub dt_mach_factor: Option<f64>,
    /// Regularity index of the experiment; `div v` is measured in `B^{s/3}_{∞,∞}`.
    pub s: f64,
    /// Lebesgue exponent for the vorticity `L^p` column.
    pub p: f64,
    pub nonlinear: bool,
    pub blowup_threshold: f64,
    /// Record the sampled BMO seminorm of the vorticity (costly).
    pub vorticity_bmo: bool,
    /// Keep the state at every sample time.
    pub keep_snapshots: bool,
    /// Center and width of the Gaussian test function of the weak decay column.
    pub test_center: (f64, f64),
    pub test_width: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            dt_safety: 0.5,
            dt_max: 0.05,
            dt_mach_factor: None,
            s: 0.5,
            p: 1.5,
            nonlinear: true,
            blowup_threshold: BLOWUP_THRESHOLD,
            vorticity_bmo: false,
            keep_snapshots: false,
            test_center: (0.5, 0.25),
            test_width: 1.0,
        }
    }
}

/// Diagnostics at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub grad_v_linf: f64,
    pub grad_c_linf: f64,
    pub div_besov: f64,
    pub div_linf: f64,
    pub qv_linf: f64,
    pub c_linf: f64,
    pub omega_lp: f64,
    pub omega_l2: f64,
    pub omega_linf: f64,
    /// NaN when not requested.
    pub omega_bmo: f64,
    pub hs_norm: f64,
    pub acoustic_energy: f64,
    /// `V_ε(t) = ∫₀^t (‖∇v‖_∞ + ‖∇c‖_∞)`.
    pub v_acc: f64,
    /// `W_ε(t) = ∫₀^t ‖v‖_{LL}`.
    pub w_acc: f64,
    /// `∫₀^t ‖div v‖_∞`.
    pub div_linf_acc: f64,
    /// `∫₀^t ‖(Qv, c)‖_∞⁴`.
    pub acoustic_l4_acc: f64,
    /// `∫₀^t ⟨div v, φ⟩` for the Gaussian test function `φ`.
    pub weak_div_acc: f64,
    /// `C₀(1 + t^{7/4}) ε^η e^{V_ε(t)}` with `C₀ = ‖(v₀, c₀)‖_{H^{s+2}}`.
    pub rho_proxy: f64,
}

impl TrajectorySample {
    /// CSV column names in output order.
    pub const COLUMNS: [&'static str; 19] = [
        "t",
        "grad_v_linf",
        "grad_c_linf",
        "div_besov",
        "div_linf",
        "qv_linf",
        "c_linf",
        "omega_lp",
        "omega_l2",
        "omega_linf",
        "omega_bmo",
        "hs_norm",
        "acoustic_energy",
        "v_acc",
        "w_acc",
        "div_linf_acc",
        "acoustic_l4_acc",
        "weak_div_acc",
        "rho_proxy",
    ];

    pub fn values(&self) -> [f64; 19] {
        [
            self.t,
            self.grad_v_linf,
            self.grad_c_linf,
            self.div_besov,
            self.div_linf,
            self.qv_linf,
            self.c_linf,
            self.omega_lp,
            self.omega_l2,
            self.omega_linf,
            self.omega_bmo,
            self.hs_norm,
            self.acoustic_energy,
            self.v_acc,
            self.w_acc,
            self.div_linf_acc,
            self.acoustic_l4_acc,
            self.weak_div_acc,
            self.rho_proxy,
        ]
    }
}

/// Output of [`simulate`].
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub epsilon: f64,
    pub s: f64,
    /// `‖(v₀, c₀)‖_{H^{s+2}}`.
    pub data_norm: f64,
    pub samples: Vec<TrajectorySample>,
    /// Last state reached (at `T` unless blow-up stopped the run).
    pub final_state: CompressibleState,
    pub snapshots: Vec<CompressibleState>,
    /// First bad time and reason, if the detector fired.
    pub blow_up: Option<(f64, String)>,
    pub steps: usize,
}

impl TrajectoryRecord {
    /// `Err(BlowUp)` if the run was stopped by the detector.
    pub fn outcome(&self) -> Result<()> {
        match &self.blow_up {
            Some((time, reason)) => Err(Error::BlowUp { time: *time, reason: reason.clone() }),
            None => Ok(()),
        }
    }

    /// `(∫₀^T ‖(Qv, c)‖_∞⁴)^{1/4}` at the last sample.
    pub fn acoustic_l4_linf(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.acoustic_l4_acc.powf(0.25))
    }
}

/// `η = s / (4(2s + 3))`.
pub fn eta(s: f64) -> f64 {
    s / (4.0 * (2.0 * s + 3.0))
}

/// Per-step quantities entering the accumulators.
struct Rates {
    grad: f64,
    ll: f64,
    div_linf: f64,
    acoustic_l4: f64,
    weak_div: f64,
}

struct Probe {
    partition: DyadicPartition,
    sampler: Option<BallSampler>,
    test_fn: SpectralField,
}

impl Probe {
    fn rates(&self, st: &CompressibleState) -> Result<(Rates, SpectralField, f64, f64)> {
        let grad_v = grad_linf(&st.v);
        let gc = gradient(&st.c);
        let grad_c = gc.v1.linf_norm().max(gc.v2.linf_norm());
        let div = divergence(&st.v);
        let div_linf = div.linf_norm();
        let qc = leray_q(&st.v).linf_norm().max(st.c.linf_norm());
        let ll = log_lipschitz_global(&st.v).total();
        let weak = div.inner(&self.test_fn)?;
        Ok((
            Rates { grad: grad_v + grad_c, ll, div_linf, acoustic_l4: qc.powi(4), weak_div: weak },
            div,
            grad_v,
            grad_c,
        ))
    }
}

/// Integrates from `state0` to `t_final`, sampling every `sample_dt`.
///
/// A blow-up stops the run and is stored in the record rather than
/// returned; use [`TrajectoryRecord::outcome`] to turn it into an error.
pub fn simulate(
    state0: &CompressibleState,
    t_final: f64,
    sample_dt: f64,
    opts: &SimulationOptions,
) -> Result<TrajectoryRecord> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return config(format!("final time must be positive, got {t_final}"));
    }
    if !(sample_dt > 0.0) {
        return config(format!("sample interval must be positive, got {sample_dt}"));
    }
    if !(opts.dt_max > 0.0) {
        return config(format!("dt_max must be positive, got {}", opts.dt_max));
    }
    let g = state0.grid();
    let (cx, cy) = opts.test_center;
    let w2 = opts.test_width * opts.test_width;
    let probe = Probe {
        partition: DyadicPartition::new(g)?,
        sampler: if opts.vorticity_bmo { Some(BallSampler::new(g)?) } else { None },
        test_fn: SpectralField::from_fn(g, |x, y| {
            let (dx, dy) = (g.wrap_delta(x - cx), g.wrap_delta(y - cy));
            (-(dx * dx + dy * dy) / w2).exp()
        }),
    };
    let step_opts = StepOptions { nonlinear: opts.nonlinear, blowup_threshold: opts.blowup_threshold };
    let data_norm = state0.hs_norm(opts.s + 2.0);
    let eta_eps = state0.epsilon.powf(eta(opts.s));

    let mut st = state0.clone();
    st.t = 0.0;
    let mut acc = [0.0f64; 5];
    let (mut rates, mut div, mut gv, mut gc) = probe.rates(&st)?;
    let mut samples = Vec::new();
    let mut snapshots = Vec::new();
    let mut steps = 0usize;
    let mut blow_up = None;

    let record =
        |st: &CompressibleState, div: &SpectralField, gv: f64, gc: f64, acc: &[f64; 5]| -> Result<TrajectorySample> {
            let omega = curl2d(&st.v);
            let t = st.t;
            Ok(TrajectorySample {
                t,
                grad_v_linf: gv,
                grad_c_linf: gc,
                div_besov: probe.partition.besov_norm(div, opts.s / 3.0, f64::INFINITY, f64::INFINITY, false)?,
                div_linf: div.linf_norm(),
                qv_linf: leray_q(&st.v).linf_norm(),
                c_linf: st.c.linf_norm(),
                omega_lp: omega.lp_norm(opts.p),
                omega_l2: omega.l2_norm(),
                omega_linf: omega.linf_norm(),
                omega_bmo: match &probe.sampler {
                    Some(s) => bmo_norm(&omega, s)?,
                    None => f64::NAN,
                },
                hs_norm: st.hs_norm(opts.s),
                acoustic_energy: gamma_upsilon(st).l2_coeff_norm(),
                v_acc: acc[0],
                w_acc: acc[1],
                div_linf_acc: acc[2],
                acoustic_l4_acc: acc[3],
                weak_div_acc: acc[4],
                rho_proxy: data_norm * (1.0 + t.powf(1.75)) * eta_eps * acc[0].exp(),
            })
        };

    samples.push(record(&st, &div, gv, gc, &acc)?);
    if opts.keep_snapshots {
        snapshots.push(st.clone());
    }
    let n_samples = (t_final / sample_dt - 1e-9).ceil().max(1.0) as usize;
    'outer: for m in 1..=n_samples {
        let t_next = (m as f64 * sample_dt).min(t_final);
        while st.t < t_next - 1e-12 * t_final.max(1.0) {
            let mut dt = cfl_dt(&st, opts.dt_safety, opts.dt_max)?;
            if let Some(f) = opts.dt_mach_factor {
                dt = dt.min(f * st.epsilon);
            }
            let remaining = t_next - st.t;
            // avoid a sliver step just before the sample time
            if dt >= remaining || remaining - dt < 0.1 * dt {
                dt = if dt >= remaining { remaining } else { 0.5 * remaining };
            }
            let next = match step_with(&st, dt, step_opts) {
                Ok(s) => s,
                Err(Error::BlowUp { time, reason }) => {
                    blow_up = Some((time, reason));
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            let (r, d, a, b) = probe.rates(&next)?;
            acc[0] += 0.5 * dt * (rates.grad + r.grad);
            acc[1] += 0.5 * dt * (rates.ll + r.ll);
            acc[2] += 0.5 * dt * (rates.div_linf + r.div_linf);
            acc[3] += 0.5 * dt * (rates.acoustic_l4 + r.acoustic_l4);
            acc[4] += 0.5 * dt * (rates.weak_div + r.weak_div);
            rates = r;
            div = d;
            gv = a;
            gc = b;
            st = next;
            steps += 1;
        }
        st.t = t_next;
        samples.push(record(&st, &div, gv, gc, &acc)?);
        if opts.keep_snapshots {
            snapshots.push(st.clone());
        }
    }
    Ok(TrajectoryRecord {
        epsilon: state0.epsilon,
        s: opts.s,
        data_norm,
        samples,
        final_state: st,
        snapshots,
        blow_up,
        steps,
    })
}
