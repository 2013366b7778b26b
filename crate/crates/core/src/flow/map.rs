//! Forward and backward particle trajectories.

use std::sync::Arc;

use rayon::prelude::*;

use super::history::VelocityHistory;
use crate::error::{config, Result};

/// Particle integration settings.
#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Largest RK4 step.
    pub dt: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { dt: 0.01 }
    }
}

/// `(x, y, A₁₁, A₁₂, A₂₁, A₂₂, ∫div v)`; `A = Dψ` solves `Ȧ = ∇v(ψ) A`.
type Particle = [f64; 7];

fn rhs(h: &VelocityHistory, t: f64, p: &Particle) -> Particle {
    let s = h.sample(t, p[0], p[1]);
    // s = [v1, v2, ∂₁v₁, ∂₂v₁, ∂₁v₂, ∂₂v₂, div]
    let (g11, g12, g21, g22) = (s[2], s[3], s[4], s[5]);
    [
        s[0],
        s[1],
        g11 * p[2] + g12 * p[4],
        g11 * p[3] + g12 * p[5],
        g21 * p[2] + g22 * p[4],
        g21 * p[3] + g22 * p[5],
        s[6],
    ]
}

fn rk4(h: &VelocityHistory, t: f64, dt: f64, p: &Particle) -> Particle {
    let axpy = |a: &Particle, k: &Particle, c: f64| -> Particle {
        let mut o = *a;
        for i in 0..7 {
            o[i] += c * k[i];
        }
        o
    };
    let k1 = rhs(h, t, p);
    let k2 = rhs(h, t + 0.5 * dt, &axpy(p, &k1, 0.5 * dt));
    let k3 = rhs(h, t + 0.5 * dt, &axpy(p, &k2, 0.5 * dt));
    let k4 = rhs(h, t + dt, &axpy(p, &k3, dt));
    let mut o = *p;
    for i in 0..7 {
        o[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    o
}

/// Advances particles from `t_a` to `t_b` (either direction) in equal steps.
fn advance(h: &VelocityHistory, particles: &mut [Particle], t_a: f64, t_b: f64, dt_max: f64) {
    if t_a == t_b {
        return;
    }
    let steps = ((t_b - t_a).abs() / dt_max).ceil().max(1.0) as usize;
    let dt = (t_b - t_a) / steps as f64;
    particles.par_iter_mut().for_each(|p| {
        for k in 0..steps {
            *p = rk4(h, t_a + k as f64 * dt, dt, p);
        }
    });
}

fn start(points: &[(f64, f64)]) -> Vec<Particle> {
    points.iter().map(|&(x, y)| [x, y, 1.0, 0.0, 0.0, 1.0, 0.0]).collect()
}

/// Whether a point left the fundamental box `[−L/2, L/2)²`.
fn outside(h: &VelocityHistory, x: f64, y: f64) -> bool {
    let l = 0.5 * h.grid().box_length();
    !(x >= -l && x < l && y >= -l && y < l)
}

fn check_options(opts: &FlowOptions) -> Result<()> {
    if !(opts.dt > 0.0) {
        return config(format!("particle time step must be positive, got {}", opts.dt));
    }
    Ok(())
}

/// Square lattice of `m × m` seeds with spacing `δ`, centered at `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub m: usize,
    pub spacing: f64,
    pub center: (f64, f64),
}

impl Lattice {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let off = 0.5 * (self.m as f64 - 1.0) * self.spacing;
        (0..self.m * self.m)
            .map(|k| {
                let (i, j) = (k / self.m, k % self.m);
                (self.center.0 - off + i as f64 * self.spacing, self.center.1 - off + j as f64 * self.spacing)
            })
            .collect()
    }
}

/// Forward trajectories `ψ(t, x)` of a set of seeds at the requested times.
#[derive(Debug, Clone)]
pub struct FlowMap {
    pub history: Arc<VelocityHistory>,
    pub seeds: Vec<(f64, f64)>,
    pub lattice: Option<Lattice>,
    pub times: Vec<f64>,
    /// `positions[k][i] = ψ(times[k], seeds[i])`, unwrapped.
    pub positions: Vec<Vec<(f64, f64)>>,
    /// `det Dψ` from the variational equation.
    pub jacobian: Vec<Vec<f64>>,
    /// `∫₀^t (div v)(τ, ψ(τ, x)) dτ`.
    pub div_integral: Vec<Vec<f64>>,
    /// `β(t) = exp(∫₀^t ‖v‖_{LL})` at each time.
    pub beta: Vec<f64>,
    /// Particles that left the fundamental box (wrapped for interpolation).
    pub flagged: Vec<bool>,
}

/// RK4 particle integration with bicubic velocity interpolation, carrying
/// the Jacobian matrix and the divergence line integral along each path.
pub fn integrate_flow(
    history: Arc<VelocityHistory>,
    seeds: &[(f64, f64)],
    t_grid: &[f64],
    opts: &FlowOptions,
) -> Result<FlowMap> {
    check_options(opts)?;
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return config("time grid must be nonempty and nondecreasing");
    }
    let t0 = history.times()[0];
    for &t in t_grid {
        history.check_time(t)?;
    }
    let mut ps = start(seeds);
    let mut flagged = vec![false; seeds.len()];
    let mut positions = Vec::new();
    let mut jacobian = Vec::new();
    let mut div_integral = Vec::new();
    let mut beta = Vec::new();
    let mut t = t0;
    for &tk in t_grid {
        advance(&history, &mut ps, t, tk, opts.dt);
        t = tk;
        for (f, p) in flagged.iter_mut().zip(&ps) {
            *f |= outside(&history, p[0], p[1]);
        }
        positions.push(ps.iter().map(|p| (p[0], p[1])).collect());
        jacobian.push(ps.iter().map(|p| p[2] * p[5] - p[3] * p[4]).collect());
        div_integral.push(ps.iter().map(|p| p[6]).collect());
        beta.push(history.beta(tk));
    }
    Ok(FlowMap {
        history,
        seeds: seeds.to_vec(),
        lattice: None,
        times: t_grid.to_vec(),
        positions,
        jacobian,
        div_integral,
        beta,
        flagged,
    })
}

/// [`integrate_flow`] on a lattice, enabling quad-area Jacobians.
pub fn integrate_lattice(
    history: Arc<VelocityHistory>,
    lattice: Lattice,
    t_grid: &[f64],
    opts: &FlowOptions,
) -> Result<FlowMap> {
    if lattice.m < 2 || !(lattice.spacing > 0.0) {
        return config("lattice needs m ≥ 2 and positive spacing");
    }
    let mut fm = integrate_flow(history, &lattice.points(), t_grid, opts)?;
    fm.lattice = Some(lattice);
    Ok(fm)
}

impl FlowMap {
    /// Index of a stored time.
    pub fn time_index(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or_else(|| crate::Error::Range(format!("time {t} is not on the flow map's time grid")))
    }

    /// Areas of the images of lattice quads divided by `δ²`.
    pub fn quad_area_ratios(&self, k: usize) -> Result<Vec<f64>> {
        let lat =
            self.lattice.ok_or_else(|| crate::Error::Precondition("flow map was not built on a lattice".into()))?;
        let m = lat.m;
        let pos = &self.positions[k];
        let mut out = Vec::with_capacity((m - 1) * (m - 1));
        for i in 0..m - 1 {
            for j in 0..m - 1 {
                let q = [pos[i * m + j], pos[(i + 1) * m + j], pos[(i + 1) * m + j + 1], pos[i * m + j + 1]];
                let mut a = 0.0;
                for c in 0..4 {
                    let (p, r) = (q[c], q[(c + 1) % 4]);
                    a += p.0 * r.1 - r.0 * p.1;
                }
                out.push(0.5 * a / (lat.spacing * lat.spacing));
            }
        }
        Ok(out)
    }

    /// Backward map `φ(0, t, ·)` at the seeds' positions reinterpreted as
    /// Eulerian points at time `t`.
    pub fn inverse(&self, t: f64, opts: &FlowOptions) -> Result<PointMap> {
        inverse_flow(&self.history, &self.seeds, t, opts)
    }

    /// Fraction of particles with `e^{−D} ≤ J ≤ e^{D}`, `D = ∫₀^t ‖div v‖_∞`.
    pub fn jacobian_bound_fraction(&self, k: usize) -> f64 {
        let d = self.history.div_linf_integral(self.times[k]);
        let (lo, hi) = ((-d).exp() * (1.0 - 1e-9), d.exp() * (1.0 + 1e-9));
        let js = &self.jacobian[k];
        js.iter().filter(|&&j| j >= lo && j <= hi).count() as f64 / js.len().max(1) as f64
    }
}

/// Images `φ(t_to, t_from, x)` of points `x` given at time `t_from`, with
/// the divergence integral along the connecting path.
#[derive(Debug, Clone)]
pub struct PointMap {
    pub points: Vec<(f64, f64)>,
    pub t_from: f64,
    pub t_to: f64,
    /// Unwrapped image positions.
    pub images: Vec<(f64, f64)>,
    /// `∫ (div v)(τ, path(τ)) dτ` over the interval, oriented forward in time.
    pub div_integral: Vec<f64>,
    pub flagged: Vec<bool>,
}

/// Transports points from `t_from` to `t_to` (either direction).
pub fn map_points(
    history: &VelocityHistory,
    points: &[(f64, f64)],
    t_from: f64,
    t_to: f64,
    opts: &FlowOptions,
) -> Result<PointMap> {
    check_options(opts)?;
    history.check_time(t_from)?;
    history.check_time(t_to)?;
    let mut ps = start(points);
    advance(history, &mut ps, t_from, t_to, opts.dt);
    let sign = if t_to >= t_from { 1.0 } else { -1.0 };
    Ok(PointMap {
        points: points.to_vec(),
        t_from,
        t_to,
        images: ps.iter().map(|p| (p[0], p[1])).collect(),
        div_integral: ps.iter().map(|p| sign * p[6]).collect(),
        flagged: ps.iter().map(|p| outside(history, p[0], p[1])).collect(),
    })
}

/// `φ(t_to, t_from, ·)` for `t_to ≤ t_from`.
pub fn backward_map(
    history: &VelocityHistory,
    points: &[(f64, f64)],
    t_from: f64,
    t_to: f64,
    opts: &FlowOptions,
) -> Result<PointMap> {
    if t_to > t_from {
        return config(format!("backward map needs t_to ≤ t_from, got {t_to} > {t_from}"));
    }
    map_points(history, points, t_from, t_to, opts)
}

/// `φ(0, t, x) = ψ⁻¹(t, x)` at the given points.
pub fn inverse_flow(history: &VelocityHistory, points: &[(f64, f64)], t: f64, opts: &FlowOptions) -> Result<PointMap> {
    backward_map(history, points, t, history.times()[0], opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{leray_p, random, Grid, SpectralField, VectorField};
    use std::f64::consts::PI;

    fn rotation() -> VectorField {
        crate::initial_data::localized_rotation(Grid::new(128, 16.0).unwrap(), 2.0)
    }

    fn random_history(seed: u64, solenoidal: bool) -> VelocityHistory {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let mut r = random::rng(seed);
        let mut a = random::smooth_vector(g, &mut r, 3.0);
        let mut b = random::smooth_vector(g, &mut r, 3.0);
        if solenoidal {
            a = leray_p(&a);
            b = leray_p(&b);
        }
        let s = 0.5 / a.linf_norm();
        let times: Vec<f64> = (0..=8).map(|k| 0.125 * k as f64).collect();
        let vs: Vec<VectorField> = times.iter().map(|&t| a.axpby(s, &b, s * t).unwrap()).collect();
        VelocityHistory::new(times, &vs).unwrap()
    }

    #[test]
    fn zero_velocity_gives_identity() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let h = Arc::new(VelocityHistory::steady(&VectorField::zeros(g)).unwrap());
        let seeds = [(0.3, -1.0), (2.0, 2.5)];
        let fm = integrate_flow(h.clone(), &seeds, &[0.0, 0.5, 1.0], &FlowOptions::default()).unwrap();
        for k in 0..3 {
            assert_eq!(fm.positions[k], seeds.to_vec());
            assert_eq!(fm.jacobian[k], vec![1.0, 1.0]);
            assert_eq!(fm.div_integral[k], vec![0.0, 0.0]);
        }
        assert_eq!(fm.beta[0], 1.0);
        let back = inverse_flow(&h, &seeds, 1.0, &FlowOptions::default()).unwrap();
        assert_eq!(back.images, seeds.to_vec());
    }

    #[test]
    fn rigid_rotation_on_the_core() {
        let h = Arc::new(VelocityHistory::steady(&rotation()).unwrap());
        let seeds: Vec<(f64, f64)> = (0..12)
            .map(|k| {
                let th = 0.5 * k as f64;
                (0.1 * k as f64 * th.cos(), 0.1 * k as f64 * th.sin())
            })
            .collect();
        let t = 1.3;
        let fm = integrate_flow(h.clone(), &seeds, &[t], &FlowOptions::default()).unwrap();
        let (s, c) = t.sin_cos();
        for (&(x, y), &(px, py)) in seeds.iter().zip(&fm.positions[0]) {
            assert!((px.hypot(py) - x.hypot(y)).abs() < 1e-8);
            assert!((px - (c * x - s * y)).abs() < 1e-6 && (py - (s * x + c * y)).abs() < 1e-6);
        }
        let back = inverse_flow(&h, &seeds, t, &FlowOptions::default()).unwrap();
        for (&(x, y), &(px, py)) in seeds.iter().zip(&back.images) {
            assert!((px - (c * x + s * y)).abs() < 1e-6 && (py - (-s * x + c * y)).abs() < 1e-6);
        }
    }

    #[test]
    fn gradient_flow_jacobian_matches_divergence_integral() {
        let g = Grid::new(256, 2.0 * PI).unwrap();
        let v = crate::spectral::gradient(&SpectralField::from_fn(g, |x, _| x.sin()));
        let h = Arc::new(VelocityHistory::steady(&v).unwrap());
        let seeds = [(0.4, 0.0), (2.0, 1.0), (-1.0, 3.0)];
        let t = 0.8;
        let fm = integrate_flow(h, &seeds, &[t], &FlowOptions { dt: 0.002 }).unwrap();
        for (i, &(x0, _)) in seeds.iter().enumerate() {
            // independent oracle: ẋ = cos x, J̇ = −sin(x) J
            let (mut x, mut j) = (x0, 1.0f64);
            let n = 20000;
            let dt = t / n as f64;
            let f = |x: f64, j: f64| (x.cos(), -x.sin() * j);
            for _ in 0..n {
                let k1 = f(x, j);
                let k2 = f(x + 0.5 * dt * k1.0, j + 0.5 * dt * k1.1);
                let k3 = f(x + 0.5 * dt * k2.0, j + 0.5 * dt * k2.1);
                let k4 = f(x + dt * k3.0, j + dt * k3.1);
                x += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                j += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            }
            let jm = fm.jacobian[0][i];
            assert!((jm - fm.div_integral[0][i].exp()).abs() < 1e-6);
            assert!((jm - j).abs() < 1e-5, "{jm} vs {j}");
            assert!((fm.positions[0][i].0 - x).abs() < 1e-5);
        }
    }

    #[test]
    fn forward_backward_round_trip() {
        let h = random_history(3, false);
        let l = h.grid().box_length();
        let pts: Vec<(f64, f64)> = (0..40).map(|k| (0.37 * k as f64 - 3.0, 0.23 * k as f64 - 2.5)).collect();
        let opts = FlowOptions { dt: 0.01 };
        let fwd = map_points(&h, &pts, 0.0, 1.0, &opts).unwrap();
        let back = map_points(&h, &fwd.images, 1.0, 0.0, &opts).unwrap();
        for (a, b) in pts.iter().zip(&back.images) {
            assert!((a.0 - b.0).hypot(a.1 - b.1) <= 1e-5 * l);
        }
        for (a, b) in fwd.div_integral.iter().zip(&back.div_integral) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn group_law_of_backward_maps() {
        let h = random_history(4, false);
        let pts: Vec<(f64, f64)> = (0..30).map(|k| (0.31 * k as f64 - 3.0, 0.17 * k as f64)).collect();
        let opts = FlowOptions { dt: 0.005 };
        let direct = map_points(&h, &pts, 0.9, 0.0, &opts).unwrap();
        let mid = map_points(&h, &pts, 0.9, 0.4, &opts).unwrap();
        let two = map_points(&h, &mid.images, 0.4, 0.0, &opts).unwrap();
        for (a, b) in direct.images.iter().zip(&two.images) {
            assert!((a.0 - b.0).hypot(a.1 - b.1) <= 1e-5);
        }
    }

    #[test]
    fn solenoidal_flow_preserves_quad_areas() {
        let h = Arc::new(random_history(5, true));
        let lat = Lattice { m: 16, spacing: 0.2, center: (0.0, 0.0) };
        let fm = integrate_lattice(h, lat, &[0.0, 1.0], &FlowOptions::default()).unwrap();
        for k in 0..2 {
            for a in fm.quad_area_ratios(k).unwrap() {
                assert!((a - 1.0).abs() < 0.01, "area ratio {a}");
            }
            for &j in &fm.jacobian[k] {
                assert!((j - 1.0).abs() < 1e-3);
            }
            assert_eq!(fm.jacobian_bound_fraction(k), 1.0);
        }
        assert!(fm.beta[1] > 1.0);
    }

    #[test]
    fn compressible_jacobian_within_divergence_bounds() {
        let h = Arc::new(random_history(6, false));
        let lat = Lattice { m: 20, spacing: 0.25, center: (0.0, 0.0) };
        let fm = integrate_lattice(h, lat, &[0.5, 1.0], &FlowOptions::default()).unwrap();
        assert_eq!(fm.jacobian_bound_fraction(1), 1.0);
        assert!(fm.time_index(0.5).unwrap() == 0 && fm.time_index(0.7).is_err());
    }

    #[test]
    fn rejects_bad_requests() {
        let h = Arc::new(random_history(7, false));
        assert!(integrate_flow(h.clone(), &[(0.0, 0.0)], &[0.5, 0.2], &FlowOptions::default()).is_err());
        assert!(integrate_flow(h.clone(), &[(0.0, 0.0)], &[2.0], &FlowOptions::default()).is_err());
        assert!(integrate_flow(h.clone(), &[(0.0, 0.0)], &[0.5], &FlowOptions { dt: 0.0 }).is_err());
        assert!(backward_map(&h, &[(0.0, 0.0)], 0.2, 0.5, &FlowOptions::default()).is_err());
        assert!(integrate_lattice(
            h,
            Lattice { m: 1, spacing: 0.1, center: (0.0, 0.0) },
            &[0.1],
            &FlowOptions::default()
        )
        .is_err());
    }
}
