//! Dyadic Littlewood–Paley decomposition on the periodic grid.
//!
//! `χ` is a smooth radial bump equal to 1 on `|ξ| ≤ 1/2` and vanishing for
//! `|ξ| ≥ 1`; `φ(ξ) = χ(ξ/2) − χ(ξ)`. Blocks are `Δ₋₁ = χ(D)` and
//! `Δ_q = φ(2^{−q}D)` for `q ≥ 0`, with `ξ` the physical wavevector.

use num_complex::Complex64;

use crate::error::{config, Error, Result};
use crate::spectral::{Grid, SpectralField};

/// `exp(−1/x)` for `x > 0`, 0 otherwise.
fn bump_tail(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Low-frequency profile `χ(r)` of a radial argument `r = |ξ|`.
pub fn chi(r: f64) -> f64 {
    if r <= 0.5 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    let t = 2.0 * (r - 0.5);
    let a = bump_tail(1.0 - t);
    a / (a + bump_tail(t))
}

/// Annulus profile `φ(r) = χ(r/2) − χ(r)`, supported in `1/2 ≤ r ≤ 2`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// Which dyadic operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Inhomogeneous block `Δ_q`, `q ≥ −1`.
    Delta,
    /// Low-frequency cutoff `S_q = Σ_{j ≤ q−1} Δ_j = χ(2^{−q}D)`, `q ≥ 0`.
    LowPass,
    /// Homogeneous block `Δ̇_q = φ(2^{−q}D)`, any integer `q`.
    HomogeneousDelta,
}

/// Dyadic masks sampled on a grid's wavevectors.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Grid,
    radii: Vec<f64>,
    q_max: i32,
    q_min: i32,
    /// `masks[q + 1]` holds `Δ_q` for `q = −1..=q_max`.
    masks: Vec<Vec<f64>>,
}

impl DyadicPartition {
    /// Builds the partition. `q_max` is the smallest `q` with
    /// `2^q ≥ max |k|`, so the inhomogeneous blocks sum to 1 on every
    /// grid wavevector; `q_min` is the first homogeneous block that
    /// sees the fundamental mode `2π/L`.
    pub fn new(grid: Grid) -> Result<Self> {
        let k_corner = grid.k_max_corner();
        let q_max = k_corner.log2().ceil() as i32;
        if q_max < 2 {
            return config(format!(
                "grid resolves wavenumbers only up to {k_corner:.3}; need at least 4 dyadic blocks"
            ));
        }
        let q_min = grid.k0().log2().floor() as i32;
        let radii: Vec<f64> = (0..grid.len()).map(|i| grid.wavevector_norm(i)).collect();
        let masks = (-1..=q_max).map(|q| radii.iter().map(|&r| Self::delta_profile(q, r)).collect()).collect();
        Ok(Self { grid, radii, q_max, q_min, masks })
    }

    fn delta_profile(q: i32, r: f64) -> f64 {
        if q < 0 {
            chi(r)
        } else {
            phi(r * 2f64.powi(-q))
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    /// Mask of `Δ_q` (zero beyond `q_max`).
    pub fn delta_mask(&self, q: i32) -> Result<Vec<f64>> {
        if q < -1 {
            return Err(Error::Range(format!("Δ_q needs q ≥ −1, got {q}")));
        }
        if q > self.q_max {
            return Ok(vec![0.0; self.grid.len()]);
        }
        Ok(self.masks[(q + 1) as usize].clone())
    }

    /// Mask of the requested operator at level `q`.
    pub fn mask(&self, q: i32, kind: Projection) -> Result<Vec<f64>> {
        match kind {
            Projection::Delta => self.delta_mask(q),
            Projection::LowPass => {
                if q < 0 {
                    return Err(Error::Range(format!("S_q needs q ≥ 0, got {q}")));
                }
                let s = 2f64.powi(-q);
                Ok(self.radii.iter().map(|&r| chi(r * s)).collect())
            }
            Projection::HomogeneousDelta => {
                let s = 2f64.powi(-q);
                Ok(self.radii.iter().map(|&r| if r == 0.0 { 0.0 } else { phi(r * s) }).collect())
            }
        }
    }

    /// Applies the operator to `f`.
    pub fn project(&self, f: &SpectralField, q: i32, kind: Projection) -> Result<SpectralField> {
        self.check(f)?;
        let m = self.mask(q, kind)?;
        Ok(f.map_spectral(|idx, c| c * m[idx]))
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        if f.grid() != self.grid {
            return config("field grid does not match partition grid");
        }
        Ok(())
    }

    /// Levels used by Besov sums.
    pub fn levels(&self, homogeneous: bool) -> std::ops::RangeInclusive<i32> {
        if homogeneous {
            self.q_min..=self.q_max
        } else {
            -1..=self.q_max
        }
    }

    /// Block `q` of the inhomogeneous or homogeneous decomposition.
    pub fn block(&self, f: &SpectralField, q: i32, homogeneous: bool) -> Result<SpectralField> {
        let kind = if homogeneous { Projection::HomogeneousDelta } else { Projection::Delta };
        self.project(f, q, kind)
    }

    /// `Σ_q Δ_q f` over all inhomogeneous levels.
    pub fn reconstruct(&self, f: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        let s = f.spectral();
        let out: Vec<Complex64> = (0..s.len())
            .map(|idx| {
                let w: f64 = self.masks.iter().map(|m| m[idx]).sum();
                s[idx] * w
            })
            .collect();
        SpectralField::from_spectral(self.grid, out)
    }

    /// Largest deviation of `Σ_q` masks from 1 over all grid wavevectors.
    pub fn partition_defect(&self) -> f64 {
        (0..self.grid.len()).map(|idx| (self.masks.iter().map(|m| m[idx]).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `‖(2^{qs}‖Δ_q f‖_{L^p})_q‖_{ℓ^r}`.
    pub fn besov_norm(&self, f: &SpectralField, s: f64, p: f64, r: f64, homogeneous: bool) -> Result<f64> {
        if p < 1.0 || r < 1.0 {
            return Err(Error::Range(format!("Besov indices need p, r ≥ 1, got p = {p}, r = {r}")));
        }
        let mut terms = Vec::new();
        for q in self.levels(homogeneous) {
            let b = self.block(f, q, homogeneous)?;
            terms.push(2f64.powf(q as f64 * s) * b.lp_norm(p));
        }
        Ok(sequence_norm(&terms, r))
    }

    /// Measured Bernstein ratios for `S_q f` and `Δ̇_q f`.
    pub fn bernstein_verify(&self, f: &SpectralField, q: i32, k: u32, a: f64, b: f64) -> Result<BernsteinReport> {
        if a > b {
            return Err(Error::Range(format!("Bernstein needs a ≤ b, got a = {a}, b = {b}")));
        }
        let low = self.project(f, q, Projection::LowPass)?;
        let ann = self.project(f, q, Projection::HomogeneousDelta)?;
        let scale_q = 2f64.powi(q);
        let low_a = low.lp_norm(a);
        let ann_a = ann.lp_norm(a);

        let mut upper = 0.0f64;
        let mut derivative_ratios = Vec::new();
        for order in 0..=k {
            for a1 in 0..=order {
                let alpha = (a1, order - a1);
                let d = derivative(&low, alpha);
                let ratio = if low_a > 0.0 { d.lp_norm(b) / low_a } else { 0.0 };
                if order == k {
                    derivative_ratios.push((alpha, ratio));
                }
                let norm = scale_q.powf(k as f64 + 2.0 * (1.0 / a - 1.0 / b));
                upper = upper.max(ratio / norm);
            }
        }

        let mut lower = 0.0f64;
        for a1 in 0..=k {
            let d = derivative(&ann, (a1, k - a1));
            if ann_a > 0.0 {
                lower = lower.max(d.lp_norm(a) / (scale_q.powi(k as i32) * ann_a));
            }
        }

        Ok(BernsteinReport { q, k, a, b, upper_ratio: upper, lower_ratio: lower, derivative_ratios })
    }
}

/// `ℓ^r` norm of a finite sequence (`r = ∞` allowed).
pub fn sequence_norm(terms: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        terms.iter().fold(0.0, |m, t| m.max(t.abs()))
    } else {
        terms.iter().map(|t| t.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `∂₁^{α₁} ∂₂^{α₂} f`.
pub fn derivative(f: &SpectralField, alpha: (u32, u32)) -> SpectralField {
    let g = f.grid();
    let i = Complex64::new(0.0, 1.0);
    f.map_spectral(|idx, c| {
        let (k1, k2) = g.wavevector(idx);
        c * (i * k1).powu(alpha.0) * (i * k2).powu(alpha.1)
    })
}

/// Outcome of one Bernstein measurement.
#[derive(Debug, Clone)]
pub struct BernsteinReport {
    pub q: i32,
    pub k: u32,
    pub a: f64,
    pub b: f64,
    /// `sup_{|α|≤k} ‖∂^α S_q f‖_{L^b} / (2^{q(k + 2(1/a − 1/b))} ‖S_q f‖_{L^a})`.
    pub upper_ratio: f64,
    /// `sup_{|α|=k} ‖∂^α Δ̇_q f‖_{L^a} / (2^{qk} ‖Δ̇_q f‖_{L^a})`.
    pub lower_ratio: f64,
    /// Raw `‖∂^α S_q f‖_{L^b} / ‖S_q f‖_{L^a}` for each `|α| = k`.
    pub derivative_ratios: Vec<((u32, u32), f64)>,
}

impl BernsteinReport {
    /// Smallest `C` with `upper ≤ C^k` and `lower ≥ C^{−k}` (for `k ≥ 1`).
    pub fn implied_constant(&self) -> f64 {
        if self.k == 0 {
            return 1.0;
        }
        let k = self.k as f64;
        let mut c = self.upper_ratio.powf(1.0 / k);
        if self.lower_ratio > 0.0 {
            c = c.max(self.lower_ratio.recip().powf(1.0 / k));
        }
        c
    }
}
