//! `machlab`: simulations, ε-sweeps, norm estimates and flow maps from the
//! command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use machlab_core::compressible::{simulate, CompressibleState, TrajectorySample};
use machlab_core::flow::{
    integrate_lattice, theorem_bound_eval, BoundOptions, BoundTerms, FlowOptions, Lattice, VelocityHistory,
};
use machlab_core::funcspaces::{bmo_f_norm, bmo_norm, lmo_f_norm, BallSampler};
use machlab_core::harness::{
    convergence_report, emit_report, parse_key_values, parse_weight, reference_options, run_sweep, simulation_options,
    sweep_data, write_resolved_config, ConvergenceTable, ReportFormat, SweepConfig, SweepReport, Table,
};
use machlab_core::incompressible::{simulate_reference, ReferenceSample};
use machlab_core::io::{read_field, read_fields, read_velocity_history, write_fields, write_velocity_history};
use machlab_core::spectral::curl2d;
use machlab_core::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_BLOW_UP: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "machlab", version, about = "Low Mach number limit laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed of the data recipe (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One run at the first epsilon of the configuration.
    Simulate {
        /// Run the incompressible reference from curl v0 instead.
        #[arg(long)]
        incompressible: bool,
    },
    /// Compressible runs for every epsilon plus the reference, with fits.
    Sweep,
    /// Ball-sampled norms of every field in a field file.
    Norms(NormsArgs),
    /// Particle trajectories and bound terms from a stored velocity history.
    Flowmap(FlowmapArgs),
    /// Convergence towards the reference at every sample time.
    Compare,
}

#[derive(Args, Debug)]
struct NormsArgs {
    /// Field file.
    field: PathBuf,
    /// Weight selector: log:<a>, power:<b>, loglog or log (default: config `weight`).
    #[arg(long)]
    weight: Option<String>,
    /// Lebesgue exponent of the Lp column (default: config `p`).
    #[arg(long)]
    p: Option<f64>,
    /// Ball-center stride in grid points.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    min_radius: Option<f64>,
    #[arg(long)]
    max_radius: Option<f64>,
    /// Restrict centers to a disc, given as `cx,cy,w`.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args, Debug)]
struct FlowmapArgs {
    /// Velocity history written by `simulate` (default: <out>/history.field).
    #[arg(long)]
    history: Option<PathBuf>,
    /// Initial scalar to transport (default: curl of the first frame).
    #[arg(long)]
    field: Option<PathBuf>,
    /// Particles per lattice side.
    #[arg(long, default_value_t = 32)]
    lattice: usize,
    /// Lattice spacing (default: half the box over the lattice size).
    #[arg(long)]
    spacing: Option<f64>,
    /// Particle time step.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Skip the bound-report table.
    #[arg(long)]
    no_bounds: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(blow_up) => ExitCode::from(if blow_up { EXIT_BLOW_UP } else { 0 }),
        Err(e) => {
            eprintln!("machlab: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

/// Returns whether a blow-up was detected.
fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    let (cfg, extra) = load_config(&cli)?;
    let out = cfg.out_dir.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    match cli.command {
        Command::Simulate { incompressible } => simulate_cmd(&cfg, &extra, incompressible),
        Command::Sweep => sweep_cmd(&cfg),
        Command::Norms(a) => norms_cmd(&cfg, &a).map(|_| false),
        Command::Flowmap(a) => flowmap_cmd(&cfg, &a).map(|_| false),
        Command::Compare => compare_cmd(&cfg),
    }
}

/// Keys understood by the CLI but not by [`SweepConfig`].
#[derive(Debug, Default)]
struct Extra {
    out_csv: Option<String>,
}

fn load_config(cli: &Cli) -> anyhow::Result<(SweepConfig, Extra)> {
    let mut map = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_key_values(&text)?
        }
        None => BTreeMap::new(),
    };
    let extra = Extra { out_csv: map.remove("out_csv") };
    let mut cfg = SweepConfig::from_key_values(&map)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    Ok((cfg, extra))
}

fn written(p: &Path) {
    info!("wrote {}", p.display());
}

fn write_table(t: &Table, path: &Path) -> anyhow::Result<()> {
    t.write_csv(path)?;
    written(path);
    Ok(())
}

fn write_config(cfg: &SweepConfig) -> anyhow::Result<()> {
    let p = write_resolved_config(&SweepReport::empty(cfg.clone()), &cfg.out_dir)?;
    written(&p);
    Ok(())
}

fn simulate_cmd(cfg: &SweepConfig, extra: &Extra, incompressible: bool) -> anyhow::Result<bool> {
    let data = sweep_data(cfg)?;
    let out = &cfg.out_dir;
    write_config(cfg)?;
    let csv = |default: &str| out.join(extra.out_csv.as_deref().unwrap_or(default));
    if incompressible {
        let rec = simulate_reference(&data.omega0, cfg.t_final, cfg.sample_dt, &reference_options(cfg))?;
        let mut t = Table::new("reference", &ReferenceSample::COLUMNS);
        for s in &rec.samples {
            t.push_values(&s.values());
        }
        write_table(&t, &csv("reference.csv"))?;
        let times: Vec<f64> = rec.snapshots.iter().map(|s| s.t).collect();
        let vs = rec.snapshots.iter().map(|s| s.velocity()).collect::<Result<Vec<_>, _>>()?;
        write_velocity_history(&out.join("history.field"), &times, &vs)?;
        written(&out.join("history.field"));
        write_fields(&out.join("final.field"), &[("omega", &rec.final_state.omega)])?;
        written(&out.join("final.field"));
        return report_blow_up(rec.blow_up.as_ref());
    }
    let eps = cfg.epsilons[0];
    let state = CompressibleState::new(data.v0.clone(), data.c0.clone(), eps, cfg.gamma_bar)?;
    let rec = simulate(&state, cfg.t_final, cfg.sample_dt, &simulation_options(cfg))?;
    let mut t = Table::new("trajectory", &TrajectorySample::COLUMNS);
    for s in &rec.samples {
        t.push_values(&s.values());
    }
    write_table(&t, &csv("trajectory.csv"))?;
    let times: Vec<f64> = rec.snapshots.iter().map(|s| s.t).collect();
    let vs: Vec<_> = rec.snapshots.iter().map(|s| s.v.clone()).collect();
    write_velocity_history(&out.join("history.field"), &times, &vs)?;
    written(&out.join("history.field"));
    let fs = &rec.final_state;
    let omega = curl2d(&fs.v);
    write_fields(&out.join("final.field"), &[("v1", &fs.v.v1), ("v2", &fs.v.v2), ("c", &fs.c), ("omega", &omega)])?;
    written(&out.join("final.field"));
    report_blow_up(rec.blow_up.as_ref())
}

fn report_blow_up(b: Option<&(f64, String)>) -> anyhow::Result<bool> {
    if let Some((t, reason)) = b {
        eprintln!("machlab: blow-up detected at t = {t}: {reason}");
    }
    Ok(b.is_some())
}

fn sweep_cmd(cfg: &SweepConfig) -> anyhow::Result<bool> {
    let report = run_sweep(cfg)?;
    for p in emit_report(&report, &cfg.out_dir, &[ReportFormat::Csv, ReportFormat::Svg])? {
        written(&p);
    }
    write_config(cfg)?;
    for s in report.summaries.iter().filter(|s| !s.blow_up_time.is_nan()) {
        eprintln!("machlab: blow-up detected at epsilon = {} (t = {})", s.epsilon, s.blow_up_time);
    }
    Ok(report.blow_up_detected())
}

fn parse_window(s: &str) -> anyhow::Result<((f64, f64), f64)> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().context("window")?;
    match v.as_slice() {
        [cx, cy, w] if *w > 0.0 => Ok(((*cx, *cy), *w)),
        _ => bail!("window must be cx,cy,w with w > 0, got '{s}'"),
    }
}

fn norms_cmd(cfg: &SweepConfig, a: &NormsArgs) -> anyhow::Result<()> {
    let weight = parse_weight(a.weight.as_deref().unwrap_or(&cfg.weight))?;
    let p = a.p.unwrap_or(cfg.p);
    let window = a.window.as_deref().map(parse_window).transpose()?;
    let fields = read_fields(&a.field)?;
    let mut t = Table::new("norms", &["norm_name", "value", "sampler_hash"]);
    for f in &fields {
        let g = f.field.grid();
        let base = BallSampler::new(g)?;
        let mut sampler = BallSampler::with_params(
            g,
            a.stride.unwrap_or(base.stride()),
            a.min_radius.unwrap_or(4.0 * g.spacing()),
            a.max_radius.unwrap_or(1.0),
        )?;
        if let Some((c, w)) = window {
            sampler = sampler.with_window(c, w);
        }
        let hash = sampler.hash();
        let rows = [
            ("bmo".to_string(), bmo_norm(&f.field, &sampler)?),
            (format!("bmo_{}", weight.name()), bmo_f_norm(&f.field, &weight, &sampler)?),
            (format!("lmo_{}", weight.name()), lmo_f_norm(&f.field, &weight, &sampler)?),
            (format!("l{p}"), f.field.lp_norm(p)),
            ("l2".to_string(), f.field.l2_norm()),
            ("linf".to_string(), f.field.linf_norm()),
        ];
        for (name, v) in rows {
            t.push(vec![format!("{}:{name}", f.name), v.to_string(), hash.clone()]);
        }
    }
    print!("{}", t.to_csv());
    write_table(&t, &cfg.out_dir.join("norms.csv"))
}

fn flowmap_cmd(cfg: &SweepConfig, a: &FlowmapArgs) -> anyhow::Result<()> {
    let hpath = a.history.clone().unwrap_or_else(|| cfg.out_dir.join("history.field"));
    let (times, vs) = read_velocity_history(&hpath)?;
    if times.len() < 2 {
        return Err(Error::Config(format!("{} holds fewer than two frames", hpath.display())).into());
    }
    let g = vs[0].v1.grid();
    let f0 = match &a.field {
        Some(p) => read_field(p)?.field,
        None => curl2d(&vs[0]),
    };
    let history = Arc::new(VelocityHistory::new(times.clone(), &vs)?);
    let opts = FlowOptions { dt: a.dt };
    let spacing = a.spacing.unwrap_or(0.5 * g.box_length() / a.lattice as f64);
    let lattice = Lattice { m: a.lattice, spacing, center: (0.0, 0.0) };
    let fm = integrate_lattice(history.clone(), lattice, &times, &opts)?;

    let mut parts =
        Table::new("particles", &["t", "index", "x0", "y0", "x", "y", "jacobian", "div_integral", "flagged"]);
    for (k, &t) in fm.times.iter().enumerate() {
        for (i, &(x0, y0)) in fm.seeds.iter().enumerate() {
            let (x, y) = fm.positions[k][i];
            let flagged = if fm.flagged[i] { 1.0 } else { 0.0 };
            parts.push_values(&[t, i as f64, x0, y0, x, y, fm.jacobian[k][i], fm.div_integral[k][i], flagged]);
        }
    }
    write_table(&parts, &cfg.out_dir.join("particles.csv"))?;

    if !a.no_bounds {
        let weight = cfg.weight_fn()?;
        let sampler = BallSampler::new(g)?;
        let bopts = BoundOptions { p: cfg.p, flow: opts, ..Default::default() };
        let terms = theorem_bound_eval(&f0, &history, &weight, &times[1..], &sampler, &bopts)?;
        let mut t = Table::new("bounds", &BoundTerms::COLUMNS);
        for b in &terms {
            t.push_values(&b.values());
        }
        write_table(&t, &cfg.out_dir.join("bounds.csv"))?;
    }
    Ok(())
}

fn compare_cmd(cfg: &SweepConfig) -> anyhow::Result<bool> {
    let report = run_sweep(cfg)?;
    write_config(cfg)?;
    let mut conv = Table::new("compare", &ConvergenceTable::COLUMNS);
    let mut fits =
        Table::new("compare_fits", &["t", "q", "quantity", "slope", "intercept", "residual", "points", "status"]);
    let r = cfg.r_resolved();
    let t_end = report.records.iter().filter_map(|rec| rec.samples.last().map(|s| s.t)).fold(f64::INFINITY, f64::min);
    let sample_times: Vec<f64> = report
        .reference
        .as_ref()
        .map(|rf| rf.samples.iter().map(|s| s.t).filter(|&t| t > 0.0 && t <= t_end + 1e-12).collect())
        .unwrap_or_default();
    for &t in &sample_times {
        for &q in &cfg.q {
            let tab = convergence_report(&report, t, q, r)?;
            for row in &tab.rows {
                conv.push_values(&[t, q, r, row.epsilon, row.omega_lq, row.pv_w1r, row.pv_linf]);
            }
            for f in &tab.fits {
                let cell = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
                fits.push(vec![
                    t.to_string(),
                    q.to_string(),
                    f.quantity.clone(),
                    cell(f.fit.map(|p| p.slope)),
                    cell(f.fit.map(|p| p.intercept)),
                    cell(f.fit.map(|p| p.residual)),
                    f.x.len().to_string(),
                    f.status().to_string(),
                ]);
            }
        }
    }
    write_table(&conv, &cfg.out_dir.join("compare.csv"))?;
    write_table(&fits, &cfg.out_dir.join("compare_fits.csv"))?;
    Ok(report.blow_up_detected())
}
