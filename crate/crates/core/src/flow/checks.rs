//! Hölder regularity of the flow and the ball-inclusion property.

use std::f64::consts::{E, PI};

use super::history::VelocityHistory;
use super::map::{map_points, FlowOptions};
use crate::error::Result;

/// `g_ψ(r) = 4e r^{1/β}`.
pub fn g_psi(r: f64, beta: f64) -> f64 {
    4.0 * E * r.powf(1.0 / beta)
}

/// Sampled balls `B(x₀, r)` probed through `ring` boundary points.
#[derive(Debug, Clone)]
pub struct Probes {
    pub centers: Vec<(f64, f64)>,
    pub radii: Vec<f64>,
    pub ring: usize,
}

impl Probes {
    fn ring_points(&self, c: (f64, f64), r: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ring).map(move |j| {
            let th = 2.0 * PI * j as f64 / self.ring as f64;
            (c.0 + r * th.cos(), c.1 + r * th.sin())
        })
    }
}

/// Outcome of [`regularity_check`].
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub t: f64,
    pub beta: f64,
    /// Largest admissible separation `e^{−β}`.
    pub threshold: f64,
    /// Admissible radii actually probed.
    pub radii_used: Vec<f64>,
    /// True when no probe radius is both below `e^{−β}` and above the grid
    /// spacing, so the statement cannot be tested at this resolution.
    pub vacuous: bool,
    /// `max |ψ(x₁) − ψ(x₂)| / (e |x₁ − x₂|^{1/β})` over probed pairs.
    pub forward_ratio: f64,
    /// Same for `ψ⁻¹`.
    pub inverse_ratio: f64,
    /// Fraction of probed balls with `4ψ(B(x₀, r)) ⊂ B(ψ(x₀), g_ψ(r))`.
    pub inclusion_fraction: f64,
    pub balls: usize,
}

impl RegularityReport {
    pub fn status(&self) -> &'static str {
        if self.vacuous {
            "vacuous at this resolution"
        } else if self.forward_ratio <= 1.0 && self.inverse_ratio <= 1.0 {
            "holds"
        } else {
            "violated"
        }
    }
}

/// Probes the Hölder estimate for `ψ^{±1}(t, ·)` and the inclusion of
/// the fourfold dilation of `ψ(B)` about `ψ(x₀)` in `B(ψ(x₀), g_ψ(r))`.
///
/// Since `ψ` is a homeomorphism, the point of `ψ(B)` farthest from `ψ(x₀)`
/// lies on `ψ(∂B)`, so ring points suffice.
pub fn regularity_check(
    history: &VelocityHistory,
    probes: &Probes,
    t: f64,
    opts: &FlowOptions,
) -> Result<RegularityReport> {
    history.check_time(t)?;
    let beta = history.beta(t);
    let threshold = (-beta).exp();
    let h = history.grid().spacing();
    let radii_used: Vec<f64> = probes.radii.iter().copied().filter(|&r| r < threshold && r >= h).collect();
    let mut report = RegularityReport {
        t,
        beta,
        threshold,
        radii_used: radii_used.clone(),
        vacuous: radii_used.is_empty() || probes.centers.is_empty() || probes.ring == 0,
        forward_ratio: 0.0,
        inverse_ratio: 0.0,
        inclusion_fraction: 1.0,
        balls: 0,
    };
    if report.vacuous {
        return Ok(report);
    }
    // every ball contributes its center followed by its ring
    let mut pts = Vec::new();
    for &c in &probes.centers {
        for &r in &radii_used {
            pts.push(c);
            pts.extend(probes.ring_points(c, r));
        }
    }
    let t0 = history.times()[0];
    let fwd = map_points(history, &pts, t0, t, opts)?.images;
    let inv = map_points(history, &pts, t, t0, opts)?.images;
    let stride = probes.ring + 1;
    let mut good = 0usize;
    let mut k = 0;
    for _ in &probes.centers {
        for &r in &radii_used {
            let scale = E * r.powf(1.0 / beta);
            let (mut fmax, mut imax) = (0.0f64, 0.0f64);
            for j in 1..stride {
                fmax = fmax.max(dist(fwd[k], fwd[k + j]));
                imax = imax.max(dist(inv[k], inv[k + j]));
            }
            report.forward_ratio = report.forward_ratio.max(fmax / scale);
            report.inverse_ratio = report.inverse_ratio.max(imax / scale);
            if 4.0 * fmax <= g_psi(r, beta) {
                good += 1;
            }
            report.balls += 1;
            k += stride;
        }
    }
    report.inclusion_fraction = good as f64 / report.balls as f64;
    Ok(report)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}
