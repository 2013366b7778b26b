//! Ball sampling on the torus: averages, oscillations and nested pairs.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{config, precondition, Result};
use crate::spectral::{Grid, SpectralField};

/// Family of balls over which mean-oscillation suprema are estimated.
///
/// Centers sit on a lattice of stride `stride` grid points, radii are
/// `2^{−m} ≤ max_radius` down to `min_radius`, and each ball `B₁` of radius
/// `r₁` is paired with balls `B₂` of radius `r₁/4, r₁/8, …` centered at
/// `x₁` or `x₁ ± (r₁/4)e_j`, so that `2B₂ ⊂ B₁` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSampler {
    grid: Grid,
    stride: usize,
    radii: Vec<f64>,
    window: Option<((f64, f64), f64)>,
}

impl BallSampler {
    /// Default sampler: stride `n/32`, radii from 1 down to `4h`.
    pub fn new(grid: Grid) -> Result<Self> {
        Self::with_params(grid, (grid.n() / 32).max(1), 4.0 * grid.spacing(), 1.0)
    }

    pub fn with_params(grid: Grid, stride: usize, min_radius: f64, max_radius: f64) -> Result<Self> {
        if stride == 0 || stride > grid.n() {
            return config(format!("center stride must be in 1..={}, got {stride}", grid.n()));
        }
        if min_radius < 2.0 * grid.spacing() {
            return config(format!(
                "smallest radius {min_radius} is below two grid spacings ({})",
                2.0 * grid.spacing()
            ));
        }
        if max_radius > 1.0 || max_radius >= 0.5 * grid.box_length() {
            return config(format!("largest radius {max_radius} must be at most 1"));
        }
        let mut radii = Vec::new();
        let mut m = max_radius.log2().floor() as i32;
        loop {
            let r = 2f64.powi(m);
            if r < min_radius * (1.0 - 1e-12) {
                break;
            }
            if r <= max_radius {
                radii.push(r);
            }
            m -= 1;
        }
        if radii.is_empty() {
            return config(format!("no dyadic radius in [{min_radius}, {max_radius}]"));
        }
        Ok(Self { grid, stride, radii, window: None })
    }

    /// Restricts ball centers to the disc `|x − c| ≤ w` (torus metric).
    pub fn with_window(mut self, center: (f64, f64), w: f64) -> Self {
        self.window = Some((center, w));
        self
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn window(&self) -> Option<((f64, f64), f64)> {
        self.window
    }

    /// Whether a point may serve as a center.
    pub fn in_window(&self, p: (f64, f64)) -> bool {
        match self.window {
            None => true,
            Some((c, w)) => self.grid.torus_distance(p, c) <= w,
        }
    }

    /// Lattice of ball centers.
    pub fn centers(&self) -> Vec<(f64, f64)> {
        let n = self.grid.n();
        let mut out = Vec::new();
        for i in (0..n).step_by(self.stride) {
            for j in (0..n).step_by(self.stride) {
                let p = (self.grid.coord(i), self.grid.coord(j));
                if self.in_window(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Offsets of `B₂` relative to `B₁` for a pair level.
    pub fn pair_offsets(r1: f64) -> [(f64, f64); 5] {
        let d = 0.25 * r1;
        [(0.0, 0.0), (d, 0.0), (-d, 0.0), (0.0, d), (0.0, -d)]
    }

    /// `(i₁, i₂)` index pairs into [`Self::radii`] with `r₂ ≤ r₁/4`.
    pub fn pair_levels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.radii.len() {
            for b in (a + 2)..self.radii.len() {
                out.push((a, b));
            }
        }
        out
    }

    /// Stable digest of the sampler parameters, reported next to estimates.
    pub fn hash(&self) -> String {
        let desc = format!(
            "n={};L={:.17e};stride={};radii={:?};window={:?}",
            self.grid.n(),
            self.grid.box_length(),
            self.stride,
            self.radii,
            self.window
        );
        let digest = Sha256::digest(desc.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Values of grid points within distance `r` of `center`.
pub(crate) fn ball_values(grid: Grid, vals: &[f64], center: (f64, f64), r: f64, buf: &mut Vec<f64>) {
    buf.clear();
    let n = grid.n() as i64;
    let h = grid.spacing();
    let r2 = r * r * (1.0 + 1e-12);
    let i0 = ((center.0 - r) / h).ceil() as i64;
    let i1 = ((center.0 + r) / h).floor() as i64;
    let j0 = ((center.1 - r) / h).ceil() as i64;
    let j1 = ((center.1 + r) / h).floor() as i64;
    for i in i0..=i1 {
        let dx = i as f64 * h - center.0;
        let row = i.rem_euclid(n) as usize * n as usize;
        for j in j0..=j1 {
            let dy = j as f64 * h - center.1;
            if dx * dx + dy * dy <= r2 {
                buf.push(vals[row + j.rem_euclid(n) as usize]);
            }
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_osc(v: &[f64], avg: f64) -> f64 {
    v.iter().map(|x| (x - avg).abs()).sum::<f64>() / v.len() as f64
}

/// `⨍_B f` over grid points in the closed ball.
pub fn ball_average(f: &SpectralField, center: (f64, f64), r: f64) -> Result<f64> {
    let g = f.grid();
    if r < 2.0 * g.spacing() {
        return precondition(format!("ball radius {r} is below two grid spacings"));
    }
    let mut buf = Vec::new();
    ball_values(g, f.physical(), center, r, &mut buf);
    Ok(mean(&buf))
}

/// `⨍_B |f − ⨍_B f|`.
pub fn ball_oscillation(f: &SpectralField, center: (f64, f64), r: f64) -> Result<f64> {
    let g = f.grid();
    if r < 2.0 * g.spacing() {
        return precondition(format!("ball radius {r} is below two grid spacings"));
    }
    let mut buf = Vec::new();
    ball_values(g, f.physical(), center, r, &mut buf);
    let a = mean(&buf);
    Ok(mean_osc(&buf, a))
}

/// Per-level suprema of a field's mean oscillations and nested-ball gaps.
///
/// Every norm in this module is a cheap function of this profile, so
/// comparing weights on one field uses identical oscillation data.
#[derive(Debug, Clone)]
pub struct OscillationProfile {
    pub radii: Vec<f64>,
    /// `max_B ⨍_B |f − ⨍_B f|` per radius.
    pub osc: Vec<f64>,
    /// `(r₁, r₂, max |⨍_{B₂} f − ⨍_{B₁} f|)` per pair level.
    pub gaps: Vec<(f64, f64, f64)>,
}

impl OscillationProfile {
    pub fn compute(f: &SpectralField, sampler: &BallSampler) -> Result<Self> {
        if f.grid() != sampler.grid() {
            return config("field grid does not match sampler grid");
        }
        let g = f.grid();
        let vals = f.physical();
        let radii = sampler.radii().to_vec();
        let levels = sampler.pair_levels();
        let centers = sampler.centers();

        let per_center: Vec<(Vec<f64>, Vec<f64>)> = centers
            .par_iter()
            .map(|&c| {
                let mut buf = Vec::new();
                let mut avg = Vec::with_capacity(radii.len());
                let mut osc = Vec::with_capacity(radii.len());
                for &r in &radii {
                    ball_values(g, vals, c, r, &mut buf);
                    let a = mean(&buf);
                    avg.push(a);
                    osc.push(mean_osc(&buf, a));
                }
                let mut gaps = vec![0.0f64; levels.len()];
                for (li, &(a, b)) in levels.iter().enumerate() {
                    let (r1, r2) = (radii[a], radii[b]);
                    for (k, off) in BallSampler::pair_offsets(r1).iter().enumerate() {
                        let inner = if k == 0 {
                            avg[b]
                        } else {
                            ball_values(g, vals, (c.0 + off.0, c.1 + off.1), r2, &mut buf);
                            mean(&buf)
                        };
                        gaps[li] = gaps[li].max((inner - avg[a]).abs());
                    }
                }
                (osc, gaps)
            })
            .collect();

        let mut osc = vec![0.0f64; radii.len()];
        let mut gap_max = vec![0.0f64; levels.len()];
        for (o, gp) in &per_center {
            for (m, v) in osc.iter_mut().zip(o) {
                *m = m.max(*v);
            }
            for (m, v) in gap_max.iter_mut().zip(gp) {
                *m = m.max(*v);
            }
        }
        let gaps = levels.iter().zip(gap_max).map(|(&(a, b), v)| (radii[a], radii[b], v)).collect();
        Ok(Self { radii, osc, gaps })
    }

    /// Sampled BMO seminorm.
    pub fn bmo(&self) -> f64 {
        self.osc.iter().fold(0.0, |m, &v| m.max(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(128, 4.0).unwrap()
    }

    #[test]
    fn averages() {
        let g = grid();
        let c = SpectralField::constant(g, 2.5);
        assert_eq!(ball_average(&c, (1.0, 1.0), 0.5).unwrap(), 2.5);
        let x = SpectralField::from_fn_centered(g, |x, _| x);
        assert!(ball_average(&x, (0.0, 0.0), 0.5).unwrap().abs() < g.spacing());
        let q = SpectralField::from_fn_centered(g, |x, y| x * x + y * y);
        let r = 0.8;
        let v = ball_average(&q, (0.0, 0.0), r).unwrap();
        assert!((v / (0.5 * r * r) - 1.0).abs() < 0.05);
        assert!(ball_average(&c, (0.0, 0.0), g.spacing()).is_err());
    }

    #[test]
    fn sampler_shape() {
        let s = BallSampler::new(grid()).unwrap();
        assert_eq!(s.stride(), 4);
        assert_eq!(s.radii().first(), Some(&1.0));
        assert!(*s.radii().last().unwrap() >= 4.0 * grid().spacing());
        for (r1, r2) in s.pair_levels().iter().map(|&(a, b)| (s.radii()[a], s.radii()[b])) {
            for o in BallSampler::pair_offsets(r1) {
                assert!(o.0.hypot(o.1) + 2.0 * r2 <= r1 + 1e-15);
            }
        }
        assert_eq!(s.hash(), BallSampler::new(grid()).unwrap().hash());
        assert_ne!(s.hash(), BallSampler::with_params(grid(), 2, 0.125, 1.0).unwrap().hash());
    }

    #[test]
    fn wrap_is_consistent() {
        let g = grid();
        let f = SpectralField::from_fn(g, |x, y| (std::f64::consts::PI * x / 2.0).sin() * y.cos());
        let a = ball_average(&f, (0.1, 0.2), 0.5).unwrap();
        let b = ball_average(&f, (4.1, -3.8), 0.5).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
