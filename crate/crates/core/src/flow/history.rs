//! Stored velocity snapshots with bicubic spatial and cubic Hermite
//! temporal interpolation.

use crate::error::{config, Error, Result};
use crate::funcspaces::log_lipschitz_global;
use crate::spectral::{divergence, partial, Grid, SpectralField, VectorField};

/// Number of interpolated channels: `v₁, v₂, ∂₁v₁, ∂₂v₁, ∂₁v₂, ∂₂v₂, div v`.
pub const CHANNELS: usize = 7;

/// Keys cubic convolution kernel with `a = −1/2`.
#[inline]
fn keys(s: f64) -> f64 {
    let s = s.abs();
    if s <= 1.0 {
        1.5 * s * s * s - 2.5 * s * s + 1.0
    } else if s < 2.0 {
        -0.5 * s * s * s + 2.5 * s * s - 4.0 * s + 2.0
    } else {
        0.0
    }
}

/// Stencil indices and weights of periodic bicubic interpolation at `(x, y)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    idx: [[usize; 4]; 4],
    w: [[f64; 4]; 4],
}

impl Stencil {
    pub(crate) fn new(grid: Grid, x: f64, y: f64) -> Self {
        let n = grid.n() as i64;
        let h = grid.spacing();
        let (u, v) = (x / h, y / h);
        let (i0, j0) = (u.floor(), v.floor());
        let (fx, fy) = (u - i0, v - j0);
        let wx = [keys(1.0 + fx), keys(fx), keys(1.0 - fx), keys(2.0 - fx)];
        let wy = [keys(1.0 + fy), keys(fy), keys(1.0 - fy), keys(2.0 - fy)];
        let (i0, j0) = (i0 as i64, j0 as i64);
        let mut idx = [[0usize; 4]; 4];
        let mut w = [[0.0; 4]; 4];
        for a in 0..4 {
            let i = (i0 + a as i64 - 1).rem_euclid(n) as usize;
            for b in 0..4 {
                let j = (j0 + b as i64 - 1).rem_euclid(n) as usize;
                idx[a][b] = i * n as usize + j;
                w[a][b] = wx[a] * wy[b];
            }
        }
        Self { idx, w }
    }

    #[inline]
    pub(crate) fn apply(&self, vals: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += self.w[a][b] * vals[self.idx[a][b]];
            }
        }
        s
    }
}

/// Periodic bicubic interpolation of a field at an arbitrary point.
pub fn interpolate(f: &SpectralField, x: f64, y: f64) -> f64 {
    Stencil::new(f.grid(), x, y).apply(f.physical())
}

/// Velocity snapshots `v(t_k)` shared read-only by particle integrators.
#[derive(Debug, Clone)]
pub struct VelocityHistory {
    grid: Grid,
    times: Vec<f64>,
    frames: Vec<[Vec<f64>; CHANNELS]>,
    ll: Vec<f64>,
    div_linf: Vec<f64>,
}

impl VelocityHistory {
    /// Snapshots at strictly increasing times. A single snapshot is a
    /// steady field.
    pub fn new(times: Vec<f64>, velocities: &[VectorField]) -> Result<Self> {
        if times.is_empty() || times.len() != velocities.len() {
            return config("velocity history needs one snapshot per time and at least one");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return config("snapshot times must be strictly increasing");
        }
        let grid = velocities[0].grid();
        if velocities.iter().any(|v| v.grid() != grid) {
            return config("snapshots live on different grids");
        }
        let mut frames = Vec::with_capacity(velocities.len());
        let mut ll = Vec::with_capacity(velocities.len());
        let mut div_linf = Vec::with_capacity(velocities.len());
        for v in velocities {
            let div = divergence(v);
            div_linf.push(div.linf_norm());
            ll.push(log_lipschitz_global(v).total());
            frames.push([
                v.v1.physical().to_vec(),
                v.v2.physical().to_vec(),
                partial(&v.v1, 0).physical().to_vec(),
                partial(&v.v1, 1).physical().to_vec(),
                partial(&v.v2, 0).physical().to_vec(),
                partial(&v.v2, 1).physical().to_vec(),
                div.physical().to_vec(),
            ]);
        }
        Ok(Self { grid, times, frames, ll, div_linf })
    }

    /// Steady velocity on `[0, ∞)`.
    pub fn steady(v: &VectorField) -> Result<Self> {
        Self::new(vec![0.0], std::slice::from_ref(v))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `‖v(t_k)‖_{LL}` at the snapshots.
    pub fn ll_norms(&self) -> &[f64] {
        &self.ll
    }

    /// `‖div v(t_k)‖_∞` at the snapshots.
    pub fn div_linf(&self) -> &[f64] {
        &self.div_linf
    }

    /// `div v(t_k)` as a field.
    pub fn divergence_frame(&self, k: usize) -> Result<SpectralField> {
        SpectralField::from_physical(self.grid, self.frames[k][6].clone())
    }

    fn is_steady(&self) -> bool {
        self.times.len() == 1
    }

    /// Checks that `t` lies in the covered time span.
    pub fn check_time(&self, t: f64) -> Result<()> {
        if self.is_steady() {
            return if t >= self.times[0] - 1e-12 {
                Ok(())
            } else {
                Err(Error::Range(format!("time {t} precedes the steady field")))
            };
        }
        let (a, b) = (self.times[0], *self.times.last().unwrap());
        let tol = 1e-9 * (b - a).max(1.0);
        if t < a - tol || t > b + tol {
            return Err(Error::Range(format!("time {t} outside stored history [{a}, {b}]")));
        }
        Ok(())
    }

    /// Weights of cubic Hermite interpolation with finite-difference
    /// tangents, as `(frame, weight)` pairs.
    fn time_weights(&self, t: f64) -> ([usize; 4], [f64; 4], usize) {
        let ts = &self.times;
        let m = ts.len();
        if m == 1 {
            return ([0; 4], [1.0, 0.0, 0.0, 0.0], 1);
        }
        let t = t.clamp(ts[0], ts[m - 1]);
        let k = match ts.partition_point(|&s| s <= t) {
            0 => 0,
            p if p >= m => m - 2,
            p => p - 1,
        };
        let dt = ts[k + 1] - ts[k];
        let s = (t - ts[k]) / dt;
        let (h00, h10, h01, h11) = (
            2.0 * s * s * s - 3.0 * s * s + 1.0,
            s * s * s - 2.0 * s * s + s,
            -2.0 * s * s * s + 3.0 * s * s,
            s * s * s - s * s,
        );
        // tangent m_j = Σ c·p, expressed on frames
        let tangent = |j: usize| -> [(usize, f64); 2] {
            let (lo, hi) = (j.saturating_sub(1), (j + 1).min(m - 1));
            let d = ts[hi] - ts[lo];
            [(hi, 1.0 / d), (lo, -1.0 / d)]
        };
        let mut frames = [k, k + 1, 0, 0];
        let mut w = [h00, h01, 0.0, 0.0];
        let mut len = 2;
        let add = |f: usize, c: f64, frames: &mut [usize; 4], w: &mut [f64; 4], len: &mut usize| {
            if let Some(p) = frames[..*len].iter().position(|&x| x == f) {
                w[p] += c;
            } else {
                frames[*len] = f;
                w[*len] = c;
                *len += 1;
            }
        };
        for (f, c) in tangent(k) {
            add(f, c * h10 * dt, &mut frames, &mut w, &mut len);
        }
        for (f, c) in tangent(k + 1) {
            add(f, c * h11 * dt, &mut frames, &mut w, &mut len);
        }
        (frames, w, len)
    }

    /// All channels at `(t, x, y)`.
    pub fn sample(&self, t: f64, x: f64, y: f64) -> [f64; CHANNELS] {
        let st = Stencil::new(self.grid, x, y);
        let (frames, w, len) = self.time_weights(t);
        let mut out = [0.0; CHANNELS];
        for q in 0..len {
            let fr = &self.frames[frames[q]];
            for (c, o) in out.iter_mut().enumerate() {
                *o += w[q] * st.apply(&fr[c]);
            }
        }
        out
    }

    /// Trapezoid integral up to `t` of per-snapshot values.
    pub fn time_integral(&self, vals: &[f64], t: f64) -> f64 {
        if self.is_steady() {
            return vals[0] * (t - self.times[0]).max(0.0);
        }
        let ts = &self.times;
        let mut s = 0.0;
        for k in 0..ts.len() - 1 {
            if t <= ts[k] {
                break;
            }
            let b = t.min(ts[k + 1]);
            let frac = (b - ts[k]) / (ts[k + 1] - ts[k]);
            let vb = vals[k] + frac * (vals[k + 1] - vals[k]);
            s += 0.5 * (b - ts[k]) * (vals[k] + vb);
        }
        s
    }

    /// `∫_{t₀}^t ‖v‖_{LL}`.
    pub fn ll_integral(&self, t: f64) -> f64 {
        self.time_integral(&self.ll, t)
    }

    /// `β(t) = exp(∫₀^t ‖v‖_{LL})`.
    pub fn beta(&self, t: f64) -> f64 {
        self.ll_integral(t).exp()
    }

    /// `∫_{t₀}^t ‖div v‖_∞`.
    pub fn div_linf_integral(&self, t: f64) -> f64 {
        self.time_integral(&self.div_linf, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bicubic_reproduces_smooth_field() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(g, |x, y| x.sin() * (2.0 * y).cos());
        let mut err: f64 = 0.0;
        for k in 0..50 {
            let (x, y) = (0.37 * k as f64, 1.3 + 0.11 * k as f64);
            err = err.max((interpolate(&f, x, y) - x.sin() * (2.0 * y).cos()).abs());
        }
        // third order in h ≈ 0.098
        assert!(err < 2e-3, "{err}");
        assert_eq!(interpolate(&f, g.coord(3), g.coord(5)), f.at(3 * 64 + 5));
    }

    #[test]
    fn hermite_is_exact_for_quadratics_in_time() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let times: Vec<f64> = (0..6).map(|k| 0.1 * k as f64).collect();
        let vs: Vec<VectorField> = times
            .iter()
            .map(|&t| VectorField { v1: SpectralField::constant(g, t * t), v2: SpectralField::constant(g, 1.0 - t) })
            .collect();
        let h = VelocityHistory::new(times, &vs).unwrap();
        for &t in &[0.15, 0.23, 0.31] {
            let s = h.sample(t, 0.3, 0.4);
            assert!((s[0] - t * t).abs() < 1e-12 && (s[1] - (1.0 - t)).abs() < 1e-12);
        }
        assert!(h.check_time(0.6).is_err());
        assert!((h.div_linf_integral(0.5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_histories() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let v = VectorField::zeros(g);
        assert!(VelocityHistory::new(vec![0.0, 0.0], &[v.clone(), v.clone()]).is_err());
        assert!(VelocityHistory::new(vec![0.0], &[]).is_err());
    }
}
