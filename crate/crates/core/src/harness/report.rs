//! CSV tables and SVG log-log plots of sweep reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::sweep::{
    acoustic_rate, convergence_report, lifespan_probe, ConvergenceTable, EpsilonSummary, LifespanEntry, NamedFit,
    SweepReport,
};
use crate::compressible::TrajectorySample;
use crate::error::{io_at, Result};
use crate::incompressible::ReferenceSample;

/// Output formats of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
}

/// A named table with fixed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_values(&mut self, values: &[f64]) {
        self.push(values.iter().map(|&v| num(v)).collect());
    }

    /// Writes the table to `path`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| io_at(path, e))
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

/// Every table of a report, in a fixed order.
pub fn report_tables(report: &SweepReport) -> Result<Vec<Table>> {
    let mut traj_cols = vec!["epsilon"];
    traj_cols.extend(TrajectorySample::COLUMNS);
    let mut traj = Table::new("trajectories", &traj_cols);
    for rec in &report.records {
        for s in &rec.samples {
            let mut row = vec![num(rec.epsilon)];
            row.extend(s.values().iter().map(|&v| num(v)));
            traj.push(row);
        }
    }

    let mut reference = Table::new("reference", &ReferenceSample::COLUMNS);
    if let Some(r) = &report.reference {
        for s in &r.samples {
            reference.push(s.values().iter().map(|&v| num(v)).collect());
        }
    }

    let mut summary = Table::new("summary", &EpsilonSummary::COLUMNS);
    for s in &report.summaries {
        summary.push(vec![
            num(s.epsilon),
            s.steps.to_string(),
            num(s.blow_up_time),
            num(s.omega_l2_err),
            num(s.pv_linf_err),
            num(s.weak_div),
            num(s.div_l1_linf),
            num(s.div_besov_l1),
            num(s.acoustic_l4),
            num(acoustic_rate(s.epsilon, report.config.s)),
        ]);
    }

    let mut fits = Table::new("fits", &["table", "quantity", "slope", "intercept", "residual", "points", "status"]);
    let push_fits = |fits: &mut Table, table: &str, list: &[NamedFit]| {
        for f in list {
            let (a, b, r, n) = f.fit.map_or((None, None, None, f.x.len()), |p| {
                (Some(p.slope), Some(p.intercept), Some(p.residual), p.points)
            });
            fits.push(vec![table.into(), f.quantity.clone(), opt(a), opt(b), opt(r), n.to_string(), f.status().into()]);
        }
    };
    push_fits(&mut fits, "summary", &report.fits);

    let mut conv = Table::new("convergence", &ConvergenceTable::COLUMNS);
    if report.reference.is_some() && !report.records.is_empty() && !report.blow_up_detected() {
        let r = report.config.r_resolved();
        for &q in &report.config.q {
            let tab: ConvergenceTable = convergence_report(report, report.config.t_final, q, r)?;
            for row in &tab.rows {
                conv.push(vec![
                    num(tab.t),
                    num(q),
                    num(r),
                    num(row.epsilon),
                    num(row.omega_lq),
                    num(row.pv_w1r),
                    num(row.pv_linf),
                ]);
            }
            push_fits(&mut fits, &format!("convergence_q{q}"), &tab.fits);
        }
    }

    let mut life = Table::new("lifespan", &LifespanEntry::COLUMNS);
    for e in lifespan_probe(report)? {
        life.push(vec![
            num(e.epsilon),
            opt(e.measured),
            num(e.t_final),
            opt(e.predicted),
            num(e.triple_log),
            format!("\"{}\"", e.statement),
        ]);
    }
    Ok(vec![traj, reference, summary, conv, fits, life])
}

/// Log-log plot of a fitted law with its regression line.
pub fn fit_svg(f: &NamedFit) -> String {
    let (w, h, m) = (480.0, 360.0, 50.0);
    let pts: Vec<(f64, f64)> =
        f.x.iter()
            .zip(&f.y)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
            .map(|(x, y)| (x.ln(), y.ln()))
            .collect();
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let slope = match (&f.fit, f.status()) {
        (Some(p), st) => format!("slope {:.4} (residual {:.3}, {} points, {st})", p.slope, p.residual, p.points),
        (None, _) => "slope n/a".to_string(),
    };
    let _ =
        writeln!(s, r#"<text x="{m}" y="30" font-family="sans-serif" font-size="13">{}: {slope}</text>"#, f.quantity);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">ln epsilon</text>"#,
        w / 2.0 - 30.0,
        h - 15.0
    );
    if !pts.is_empty() {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let pad =
            |a: f64, b: f64| if b - a < 1e-12 { (a - 0.5, b + 0.5) } else { (a - 0.05 * (b - a), b + 0.05 * (b - a)) };
        let ((x0, x1), (y0, y1)) = (pad(x0, x1), pad(y0, y1));
        let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
        for &(x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#, px(x), py(y));
        }
        if let Some(p) = &f.fit {
            let (ya, yb) = (p.intercept + p.slope * x0, p.intercept + p.slope * x1);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-dasharray="6,4"/>"#,
                px(x0),
                py(ya),
                px(x1),
                py(yb)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<name>.csv` per table and `fit_<quantity>.svg` per fitted law
/// into `dir`, and returns the written paths.
pub fn emit_report(report: &SweepReport, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))?;
    let write = |name: String, body: String, out: &mut Vec<PathBuf>| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| io_at(&p, e))?;
        out.push(p);
        Ok(())
    };
    let mut out = Vec::new();
    if formats.contains(&ReportFormat::Csv) {
        for t in report_tables(report)? {
            write(format!("{}.csv", t.name), t.to_csv(), &mut out)?;
        }
    }
    if formats.contains(&ReportFormat::Svg) {
        for f in &report.fits {
            write(format!("fit_{}.svg", f.quantity), fit_svg(f), &mut out)?;
        }
    }
    Ok(out)
}

/// Writes the resolved configuration as `config.resolved` in `dir`.
pub fn write_resolved_config(report: &SweepReport, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))?;
    let p = dir.join("config.resolved");
    std::fs::write(&p, report.config.to_resolved_string()).map_err(|e| io_at(&p, e))?;
    Ok(p)
}
