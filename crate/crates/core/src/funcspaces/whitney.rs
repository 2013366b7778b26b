//! Whitney coverings of open grid sets by balls inscribed in dyadic squares.

use std::f64::consts::PI;

use crate::error::{precondition, Result};
use crate::spectral::Grid;

/// Ball of a Whitney covering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitneyBall {
    pub center: (f64, f64),
    pub radius: f64,
    /// Distance from the ball to the complement, `d(center) − r`.
    pub gap: f64,
}

/// Disjoint balls inside an open set, with radii comparable to their
/// distance to the complement.
#[derive(Debug, Clone)]
pub struct WhitneyCover {
    grid: Grid,
    pub balls: Vec<WhitneyBall>,
    /// Distance of every grid point to the complement (0 outside the set).
    pub distance: Vec<f64>,
    /// Grid points covered by some doubled ball.
    pub covered: Vec<bool>,
}

/// Bounds on `r / d(O, complement)` guaranteed by the construction.
pub const RATIO_BOUNDS: (f64, f64) = (1.0 / 8.0, 1.0 / 2.0);

/// Squared 1D distance transform (lower envelope of parabolas).
fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    let first = match f.iter().position(|x| x.is_finite()) {
        Some(i) => i,
        None => return vec![f64::INFINITY; n],
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in (first + 1)..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0: replace the only parabola
                v[0] = q;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    let mut k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *out = (q as f64 - p as f64).powi(2) + f[p];
    }
    d
}

/// Periodic squared distance transform in grid units; `seed[i]` marks
/// points at distance 0.
fn periodic_edt(n: usize, seed: &[bool]) -> Vec<f64> {
    // tripled lines make the 1D transforms periodic
    let mut tmp = vec![f64::INFINITY; n * n];
    for i in 0..n {
        let line: Vec<f64> = (0..3 * n).map(|j| if seed[i * n + j % n] { 0.0 } else { f64::INFINITY }).collect();
        let d = edt_1d(&line);
        for j in 0..n {
            tmp[i * n + j] = d[n + j];
        }
    }
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        let line: Vec<f64> = (0..3 * n).map(|i| tmp[(i % n) * n + j]).collect();
        let d = edt_1d(&line);
        for i in 0..n {
            out[i * n + j] = d[n + i];
        }
    }
    out
}

impl WhitneyCover {
    /// Builds the cover of the set `{mask = true}`.
    pub fn build(grid: Grid, mask: &[bool]) -> Result<Self> {
        let n = grid.n();
        if mask.len() != grid.len() {
            return precondition("mask size does not match grid");
        }
        if !mask.iter().any(|&m| m) {
            return precondition("open set is empty");
        }
        if mask.iter().all(|&m| m) {
            return precondition("open set has empty complement");
        }
        let h = grid.spacing();
        let complement: Vec<bool> = mask.iter().map(|m| !m).collect();
        let distance: Vec<f64> = periodic_edt(n, &complement).into_iter().map(|d| d.sqrt() * h).collect();

        let center_distance = |ci: f64, cj: f64| -> f64 {
            // ci, cj in grid units, possibly half-integer
            if ci.fract() == 0.0 && cj.fract() == 0.0 {
                return distance[(ci as usize % n) * n + cj as usize % n];
            }
            let (i0, j0) = (ci.floor() as i64, cj.floor() as i64);
            let corner = [(0, 0), (1, 0), (0, 1), (1, 1)]
                .iter()
                .map(|&(a, b)| {
                    distance[((i0 + a).rem_euclid(n as i64) as usize) * n + (j0 + b).rem_euclid(n as i64) as usize]
                })
                .fold(f64::INFINITY, f64::min);
            let reach = ((corner / h + 2.0).ceil() as i64).min(n as i64);
            let mut best = f64::INFINITY;
            for pi in (i0 - reach)..=(i0 + 1 + reach) {
                for pj in (j0 - reach)..=(j0 + 1 + reach) {
                    let k = pi.rem_euclid(n as i64) as usize * n + pj.rem_euclid(n as i64) as usize;
                    if complement[k] {
                        best = best.min((pi as f64 - ci).hypot(pj as f64 - cj));
                    }
                }
            }
            best * h
        };

        let mut balls = Vec::new();
        let mut stack = vec![(0usize, 0usize, n)];
        while let Some((i0, j0, s)) = stack.pop() {
            let inside = (i0..i0 + s).all(|i| (j0..j0 + s).all(|j| mask[i * n + j]));
            if inside {
                let (ci, cj) = (i0 as f64 + 0.5 * (s as f64 - 1.0), j0 as f64 + 0.5 * (s as f64 - 1.0));
                // the square [i0, i0+s) of cells is centered between its points
                let side = s as f64 * h;
                let d = center_distance(ci, cj);
                if d >= 1.5 * side {
                    let radius = 0.5 * side;
                    balls.push(WhitneyBall { center: (ci * h, cj * h), radius, gap: d - radius });
                    continue;
                }
            }
            if s == 1 {
                continue;
            }
            let half = s / 2;
            for (a, b) in [(0, 0), (half, 0), (0, half), (half, half)] {
                let (ii, jj) = (i0 + a, j0 + b);
                // squares that contain no point of the set are dropped
                if (ii..ii + half).any(|i| (jj..jj + half).any(|j| mask[i * n + j])) {
                    stack.push((ii, jj, half));
                }
            }
        }
        balls.sort_by(|a, b| {
            b.radius
                .partial_cmp(&a.radius)
                .unwrap()
                .then(a.center.0.partial_cmp(&b.center.0).unwrap())
                .then(a.center.1.partial_cmp(&b.center.1).unwrap())
        });

        let mut covered = vec![false; grid.len()];
        for b in &balls {
            let r = 2.0 * b.radius;
            let reach = (r / h).ceil() as i64 + 1;
            let (ci, cj) = (b.center.0 / h, b.center.1 / h);
            for di in -reach..=reach {
                for dj in -reach..=reach {
                    let (pi, pj) = (ci.round() as i64 + di, cj.round() as i64 + dj);
                    let dx = (pi as f64 - ci) * h;
                    let dy = (pj as f64 - cj) * h;
                    if dx.hypot(dy) <= r {
                        covered[pi.rem_euclid(n as i64) as usize * n + pj.rem_euclid(n as i64) as usize] = true;
                    }
                }
            }
        }
        Ok(Self { grid, balls, distance, covered })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Fraction of set points at distance `≥ min_depth` from the
    /// complement that lie in some doubled ball.
    pub fn interior_coverage(&self, min_depth: f64) -> f64 {
        let (mut tot, mut hit) = (0usize, 0usize);
        for (d, c) in self.distance.iter().zip(&self.covered) {
            if *d >= min_depth && *d > 0.0 {
                tot += 1;
                hit += *c as usize;
            }
        }
        if tot == 0 {
            1.0
        } else {
            hit as f64 / tot as f64
        }
    }

    /// Range of `r / d(O, complement)` over the balls.
    pub fn ratio_range(&self) -> (f64, f64) {
        self.balls.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), b| {
            let q = b.radius / b.gap;
            (lo.min(q), hi.max(q))
        })
    }

    /// Whether the balls are pairwise disjoint (open balls; tangency allowed).
    pub fn pairwise_disjoint(&self) -> bool {
        for (i, a) in self.balls.iter().enumerate() {
            for b in &self.balls[i + 1..] {
                if self.grid.torus_distance(a.center, b.center) < a.radius + b.radius - 1e-12 {
                    return false;
                }
            }
        }
        true
    }

    /// Shell measures `(U_k, V_k)` for `k = 0..k_max`:
    /// `U_k = Σ |O_j|` over `e^{−k−1} h(r) < r_j ≤ e^{−k} h(r)` with
    /// `h(r) = r max(1, ‖J‖_∞)`, and `V_k = Σ |O_j|` over
    /// `e^{−k−1} < 4r_j ≤ e^{−k}`.
    pub fn shell_measures(&self, r: f64, jac_sup: f64, k_max: usize) -> (Vec<f64>, Vec<f64>) {
        let hr = r * jac_sup.max(1.0);
        let mut u = vec![0.0; k_max];
        let mut v = vec![0.0; k_max];
        for b in &self.balls {
            let area = PI * b.radius * b.radius;
            for k in 0..k_max {
                let (hi, lo) = ((-(k as f64)).exp(), (-(k as f64) - 1.0).exp());
                if b.radius > lo * hr && b.radius <= hi * hr {
                    u[k] += area;
                }
                if 4.0 * b.radius > lo && 4.0 * b.radius <= hi {
                    v[k] += area;
                }
            }
        }
        (u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(grid: Grid, r: f64) -> Vec<bool> {
        (0..grid.len())
            .map(|i| {
                let (x, y) = grid.centered_point(i);
                x.hypot(y) < r
            })
            .collect()
    }

    #[test]
    fn edt_matches_brute_force() {
        let g = Grid::new(32, 4.0).unwrap();
        let m = disc(g, 1.0);
        let c = WhitneyCover::build(g, &m).unwrap();
        let n = g.n();
        for idx in (0..g.len()).step_by(7) {
            let mut best = f64::INFINITY;
            for (o, &inside) in m.iter().enumerate() {
                if !inside {
                    best = best
                        .min(g.torus_distance((g.coord(idx / n), g.coord(idx % n)), (g.coord(o / n), g.coord(o % n))));
                }
            }
            assert!((c.distance[idx] - best).abs() < 1e-12, "idx {idx}");
        }
    }

    #[test]
    fn disc_cover_contract() {
        let g = Grid::new(256, 4.0).unwrap();
        let c = WhitneyCover::build(g, &disc(g, 1.0)).unwrap();
        assert!(c.pairwise_disjoint());
        let (lo, hi) = c.ratio_range();
        assert!(lo >= RATIO_BOUNDS.0 && hi <= RATIO_BOUNDS.1, "{lo} {hi}");
        for b in &c.balls {
            assert!(b.center.0.hypot(b.center.1) > 0.0 || b.radius > 0.0);
        }
        let cov = c.interior_coverage(2.0 * g.spacing());
        assert!(cov >= 0.99, "coverage {cov}");
    }

    #[test]
    fn empty_sets_rejected() {
        let g = Grid::new(16, 4.0).unwrap();
        assert!(WhitneyCover::build(g, &vec![false; g.len()]).is_err());
        assert!(WhitneyCover::build(g, &vec![true; g.len()]).is_err());
    }
}
