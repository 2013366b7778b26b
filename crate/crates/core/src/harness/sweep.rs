//! ε-sweeps of the compressible solver against the incompressible reference.

use rayon::prelude::*;

use super::config::SweepConfig;
use super::fit::{fit_power_law, PowerFit};
use crate::compressible::{eta, simulate, CompressibleState, SimulationOptions, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::funcspaces::{osgood_m, ClassF};
use crate::incompressible::{simulate_reference, ReferenceOptions, ReferenceRecord};
use crate::initial_data::{ill_prepared_family, IllPreparedData};
use crate::spectral::{curl2d, grad_lp, leray_p, SpectralField, VectorField};

/// Per-ε quantities at the final time.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub steps: usize,
    /// Time of the first blow-up detection, NaN when none.
    pub blow_up_time: f64,
    /// `‖ω_ε(T) − ω(T)‖_{L²}`.
    pub omega_l2_err: f64,
    /// `‖Pv_ε(T) − v(T)‖_{L^∞}`.
    pub pv_linf_err: f64,
    /// `|∫₀^T ⟨div v_ε, φ⟩ dt|`.
    pub weak_div: f64,
    /// `∫₀^T ‖div v_ε‖_∞`.
    pub div_l1_linf: f64,
    /// `∫₀^T ‖div v_ε‖_{B^{s/3}_{∞,∞}}`, trapezoid over samples.
    pub div_besov_l1: f64,
    /// `(∫₀^T ‖(Qv_ε, c_ε)‖_∞⁴)^{1/4}`.
    pub acoustic_l4: f64,
}

impl EpsilonSummary {
    pub const COLUMNS: [&'static str; 10] = [
        "epsilon",
        "steps",
        "blow_up_time",
        "omega_l2_err",
        "pv_linf_err",
        "weak_div",
        "div_l1_linf",
        "div_besov_l1",
        "acoustic_l4",
        "eps_eta_half",
    ];
}

/// A fitted law `quantity ∝ ε^slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedFit {
    pub quantity: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `None` when fewer than two usable points exist.
    pub fit: Option<PowerFit>,
}

impl NamedFit {
    pub fn new(quantity: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        let fit = fit_power_law(&x, &y).ok();
        Self { quantity: quantity.into(), x, y, fit }
    }

    /// `"ok"`, `"inconclusive"` or `"n/a"`.
    pub fn status(&self) -> &'static str {
        match &self.fit {
            None => "n/a",
            Some(f) if f.inconclusive() => "inconclusive",
            Some(_) => "ok",
        }
    }
}

/// Output of [`run_sweep`].
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub config: SweepConfig,
    /// Mollifier index shared by every ε.
    pub k: u32,
    pub records: Vec<TrajectoryRecord>,
    pub reference: Option<ReferenceRecord>,
    pub summaries: Vec<EpsilonSummary>,
    pub fits: Vec<NamedFit>,
}

impl SweepReport {
    /// A report with no runs, as produced before any simulation.
    pub fn empty(config: SweepConfig) -> Self {
        Self { config, k: 0, records: Vec::new(), reference: None, summaries: Vec::new(), fits: Vec::new() }
    }

    pub fn blow_up_detected(&self) -> bool {
        self.records.iter().any(|r| r.blow_up.is_some()) || self.reference.as_ref().is_some_and(|r| r.blow_up.is_some())
    }

    pub fn fit(&self, quantity: &str) -> Option<&NamedFit> {
        self.fits.iter().find(|f| f.quantity == quantity)
    }
}

/// Data shared by every ε of a sweep: `k` and `R` are frozen at the
/// largest Mach number so the family only varies through `ε`.
pub fn sweep_data(config: &SweepConfig) -> Result<IllPreparedData> {
    let g = config.grid()?;
    let recipe = config.recipe(config.epsilons[0])?;
    ill_prepared_family(g, &recipe)
}

pub fn simulation_options(config: &SweepConfig) -> SimulationOptions {
    SimulationOptions {
        dt_safety: config.dt_safety,
        dt_max: config.dt_max,
        dt_mach_factor: (config.dt_mach_factor > 0.0).then_some(config.dt_mach_factor),
        s: config.s,
        p: config.p,
        blowup_threshold: config.blowup_threshold,
        keep_snapshots: true,
        ..Default::default()
    }
}

/// Options of the incompressible reference run of a sweep.
pub fn reference_options(config: &SweepConfig) -> ReferenceOptions {
    ReferenceOptions {
        dt_safety: config.dt_safety,
        dt_max: config.dt_max,
        p: config.p,
        keep_snapshots: true,
        blowup_threshold: config.blowup_threshold,
        ..Default::default()
    }
}

/// Runs one compressible simulation per ε, in parallel unless `serial`,
/// and the incompressible reference from `curl v₀`. Blow-ups are recorded
/// and the sweep continues.
pub fn run_sweep_with(config: &SweepConfig, serial: bool) -> Result<SweepReport> {
    config.validate()?;
    let data = sweep_data(config)?;
    let opts = simulation_options(config);
    let run = |&eps: &f64| -> Result<TrajectoryRecord> {
        let s = CompressibleState::new(data.v0.clone(), data.c0.clone(), eps, config.gamma_bar)?;
        simulate(&s, config.t_final, config.sample_dt, &opts)
    };
    let records: Vec<TrajectoryRecord> = if serial {
        config.epsilons.iter().map(run).collect::<Result<_>>()?
    } else {
        config.epsilons.par_iter().map(run).collect::<Result<_>>()?
    };
    let reference = simulate_reference(&data.omega0, config.t_final, config.sample_dt, &reference_options(config))?;
    let reference_final = reference.final_state.velocity()?;
    let mut summaries = Vec::with_capacity(records.len());
    for rec in &records {
        let last = rec.samples.last().expect("a record holds its initial sample");
        let f = &rec.final_state;
        let complete = rec.blow_up.is_none() && reference.blow_up.is_none();
        let (omega_l2_err, pv_linf_err) = if complete {
            (
                curl2d(&f.v).sub(&reference.final_state.omega)?.l2_norm(),
                leray_p(&f.v).sub(&reference_final)?.linf_norm(),
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        let besov: Vec<(f64, f64)> = rec.samples.iter().map(|s| (s.t, s.div_besov)).collect();
        summaries.push(EpsilonSummary {
            epsilon: rec.epsilon,
            steps: rec.steps,
            blow_up_time: rec.blow_up.as_ref().map_or(f64::NAN, |b| b.0),
            omega_l2_err,
            pv_linf_err,
            weak_div: last.weak_div_acc.abs(),
            div_l1_linf: last.div_linf_acc,
            div_besov_l1: trapezoid(&besov),
            acoustic_l4: rec.acoustic_l4_linf(),
        });
    }
    let eps: Vec<f64> = summaries.iter().map(|s| s.epsilon).collect();
    let col = |f: fn(&EpsilonSummary) -> f64| summaries.iter().map(f).collect::<Vec<f64>>();
    let fits = vec![
        NamedFit::new("omega_l2_err", eps.clone(), col(|s| s.omega_l2_err)),
        NamedFit::new("pv_linf_err", eps.clone(), col(|s| s.pv_linf_err)),
        NamedFit::new("weak_div", eps.clone(), col(|s| s.weak_div)),
        NamedFit::new("div_l1_linf", eps.clone(), col(|s| s.div_l1_linf)),
        NamedFit::new("div_besov_l1", eps.clone(), col(|s| s.div_besov_l1)),
        NamedFit::new("acoustic_l4", eps, col(|s| s.acoustic_l4)),
    ];
    Ok(SweepReport { config: config.clone(), k: data.k, records, reference: Some(reference), summaries, fits })
}

/// [`run_sweep_with`] on the rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    run_sweep_with(config, false)
}

fn trapezoid(pts: &[(f64, f64)]) -> f64 {
    pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// One ε row of [`convergence_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    /// `‖ω_ε(t) − ω(t)‖_{L^q}`.
    pub omega_lq: f64,
    /// `‖Pv_ε(t) − v(t)‖_{W^{1,r}}`.
    pub pv_w1r: f64,
    /// `‖Pv_ε(t) − v(t)‖_{L^∞}`.
    pub pv_linf: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub t: f64,
    pub q: f64,
    pub r: f64,
    pub rows: Vec<ConvergenceRow>,
    pub fits: Vec<NamedFit>,
}

impl ConvergenceTable {
    pub const COLUMNS: [&'static str; 7] = ["t", "q", "r", "epsilon", "omega_lq", "pv_w1r", "pv_linf"];
}

fn snapshot_index(times: impl Iterator<Item = f64>, t: f64) -> Option<usize> {
    times.enumerate().find(|(_, s)| (s - t).abs() <= 1e-9 * t.abs().max(1.0)).map(|(i, _)| i)
}

/// `L^q`, `W^{1,r}` and `L^∞` distances to the reference at a sample time.
pub fn convergence_report(report: &SweepReport, t: f64, q: f64, r: f64) -> Result<ConvergenceTable> {
    let p = report.config.p;
    if !(q >= p) {
        return Err(Error::Config(format!("q must be at least p = {p}, got {q}")));
    }
    if !(r >= 2.0 * p / (2.0 - p) - 1e-12) {
        return Err(Error::Config(format!("r must be at least 2p/(2 − p), got {r}")));
    }
    let reference = report.reference.as_ref().ok_or_else(|| Error::Range("sweep has no reference run".into()))?;
    let shortest = report
        .records
        .iter()
        .map(|r| r.samples.last().map_or(0.0, |s| s.t))
        .chain(std::iter::once(reference.samples.last().map_or(0.0, |s| s.t)))
        .fold(f64::INFINITY, f64::min);
    if !(t >= 0.0 && t <= shortest + 1e-9) {
        return Err(Error::Range(format!("t = {t} is beyond the shortest trajectory (ends at {shortest})")));
    }
    let ri = snapshot_index(reference.snapshots.iter().map(|s| s.t), t)
        .ok_or_else(|| Error::Range(format!("t = {t} is not a sample time")))?;
    let w = &reference.snapshots[ri].omega;
    let v = reference.snapshots[ri].velocity()?;
    let mut rows = Vec::new();
    for rec in &report.records {
        let k = snapshot_index(rec.snapshots.iter().map(|s| s.t), t)
            .ok_or_else(|| Error::Range(format!("t = {t} is not a sample time")))?;
        let st = &rec.snapshots[k];
        let dw: SpectralField = curl2d(&st.v).sub(w)?;
        let dv: VectorField = leray_p(&st.v).sub(&v)?;
        rows.push(ConvergenceRow {
            epsilon: rec.epsilon,
            omega_lq: if q.is_infinite() { dw.linf_norm() } else { dw.lp_norm(q) },
            pv_w1r: dv.lp_norm(r) + grad_lp(&dv, r),
            pv_linf: dv.linf_norm(),
        });
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let fits = vec![
        NamedFit::new("omega_lq", eps.clone(), rows.iter().map(|r| r.omega_lq).collect()),
        NamedFit::new("pv_w1r", eps.clone(), rows.iter().map(|r| r.pv_w1r).collect()),
        NamedFit::new("pv_linf", eps, rows.iter().map(|r| r.pv_linf).collect()),
    ];
    Ok(ConvergenceTable { t, q, r, rows, fits })
}

/// `ln ln ln ε⁻¹`, NaN where undefined.
pub fn triple_log(epsilon: f64) -> f64 {
    (1.0 / epsilon).ln().ln().ln()
}

/// Lower bound `(1/C₀) M((1 − α) ln ln ε⁻¹)` on the lifespan for weights
/// in `F′`; `None` for other weights, whose lifespan is only known to be
/// bounded below independently of `ε`.
pub fn predicted_lifespan(weight: &ClassF, osgood_c: f64, c0: f64, alpha: f64, epsilon: f64) -> Result<Option<f64>> {
    if !weight.is_class_f_prime() {
        return Ok(None);
    }
    let x = (1.0 - alpha) * (1.0 / epsilon).ln().ln();
    if !(x > 0.0) {
        return Ok(Some(0.0));
    }
    Ok(Some(osgood_m(weight, osgood_c, x)? / c0))
}

/// One ε row of [`lifespan_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct LifespanEntry {
    pub epsilon: f64,
    /// First blow-up detection, if any.
    pub measured: Option<f64>,
    pub t_final: f64,
    pub predicted: Option<f64>,
    pub triple_log: f64,
    pub statement: String,
}

impl LifespanEntry {
    pub const COLUMNS: [&'static str; 6] =
        ["epsilon", "blow_up_time", "t_final", "predicted_bound", "triple_log", "statement"];
}

fn outcome_text(measured: Option<f64>, t_final: f64) -> String {
    match measured {
        Some(t) => format!("blow-up detected at t = {t}"),
        None => format!("no blow-up within T = {t_final}"),
    }
}

fn bound_text(predicted: Option<f64>) -> String {
    match predicted {
        Some(b) => format!("predicted lifespan ≥ {b:.6}"),
        None => "weight is not in F': lifespan bounded below by some T0 > 0 independent of epsilon".into(),
    }
}

/// Measured non-blow-up windows next to the Osgood-predicted lower bounds.
/// No claim is made that the measured times follow the predicted law.
pub fn lifespan_probe(report: &SweepReport) -> Result<Vec<LifespanEntry>> {
    let cfg = &report.config;
    let weight = cfg.weight_fn()?;
    report
        .records
        .iter()
        .map(|rec| {
            let measured = rec.blow_up.as_ref().map(|b| b.0);
            let predicted = predicted_lifespan(&weight, cfg.osgood_c, cfg.lifespan_c0, cfg.alpha, rec.epsilon)?;
            Ok(LifespanEntry {
                epsilon: rec.epsilon,
                measured,
                t_final: cfg.t_final,
                predicted,
                triple_log: triple_log(rec.epsilon),
                statement: format!("{}; {}", outcome_text(measured, cfg.t_final), bound_text(predicted)),
            })
        })
        .collect()
}

/// Predicted bound curve over ε values that need no simulation.
pub fn lifespan_curve(
    weight: &ClassF,
    osgood_c: f64,
    c0: f64,
    alpha: f64,
    epsilons: &[f64],
) -> Result<Vec<(f64, Option<f64>)>> {
    epsilons.iter().map(|&e| Ok((e, predicted_lifespan(weight, osgood_c, c0, alpha, e)?))).collect()
}

/// `ε^{η/2}` with `η = s/(4(2s + 3))`.
pub fn acoustic_rate(epsilon: f64, s: f64) -> f64 {
    epsilon.powf(0.5 * eta(s))
}
