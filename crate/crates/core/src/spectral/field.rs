use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft;
use super::grid::Grid;
use crate::error::{config, Error, Result};

/// Real scalar field on a periodic grid.
///
/// Either representation may be supplied at construction; the other is
/// computed on first access and cached. Fields are immutable, so cloning
/// shares the cached buffers.
#[derive(Clone)]
pub struct SpectralField {
    grid: Grid,
    physical: OnceLock<Arc<Vec<f64>>>,
    spectral: OnceLock<Arc<Vec<Complex64>>>,
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("physical_cached", &self.physical.get().is_some())
            .field("spectral_cached", &self.spectral.get().is_some())
            .finish()
    }
}

/// Which representation to materialize in [`SpectralField::transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToSpectral,
    ToPhysical,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self::from_physical_unchecked(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self::from_physical_unchecked(grid, vec![value; grid.len()])
    }

    pub fn from_physical(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return config(format!(
                "field has {} values, grid {}x{} needs {}",
                values.len(),
                grid.n(),
                grid.n(),
                grid.len()
            ));
        }
        Ok(Self::from_physical_unchecked(grid, values))
    }

    pub(crate) fn from_physical_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        let physical = OnceLock::new();
        let _ = physical.set(Arc::new(values));
        Self { grid, physical, spectral: OnceLock::new() }
    }

    /// Builds a field from coefficients, projecting onto real fields by
    /// enforcing `û(−k) = conj û(k)`.
    pub fn from_spectral(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return config(format!("spectrum has {} coefficients, grid needs {}", coeffs.len(), grid.len()));
        }
        Ok(Self::from_spectral_unchecked(grid, coeffs))
    }

    pub(crate) fn from_spectral_unchecked(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        let sym: Vec<Complex64> =
            (0..grid.len()).into_par_iter().map(|idx| 0.5 * (coeffs[idx] + coeffs[grid.mirror(idx)].conj())).collect();
        let spectral = OnceLock::new();
        let _ = spectral.set(Arc::new(sym));
        Self { grid, physical: OnceLock::new(), spectral }
    }

    /// Samples `f(x₁, x₂)` at the grid points of `[0, L)²`.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let n = grid.n();
        let values = (0..grid.len()).into_par_iter().map(|idx| f(grid.coord(idx / n), grid.coord(idx % n))).collect();
        Self::from_physical_unchecked(grid, values)
    }

    /// Samples `f` at centered coordinates in `[−L/2, L/2)²`.
    pub fn from_fn_centered(grid: Grid, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (x1, x2) = grid.centered_point(idx);
                f(x1, x2)
            })
            .collect();
        Self::from_physical_unchecked(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn physical(&self) -> &[f64] {
        self.physical.get_or_init(|| Arc::new(fft::inverse_real(self.spectral_raw(), self.grid.n())))
    }

    pub fn spectral(&self) -> &[Complex64] {
        self.spectral_raw()
    }

    fn spectral_raw(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| {
            let phys = self.physical.get().expect("field has neither representation");
            Arc::new(fft::forward_real(phys, self.grid.n()))
        })
    }

    /// Materializes the requested representation and returns the field.
    pub fn transform(self, direction: Direction) -> Self {
        match direction {
            Direction::ToSpectral => {
                self.spectral();
            }
            Direction::ToPhysical => {
                self.physical();
            }
        }
        self
    }

    /// New field with coefficients `m(idx, û)`.
    pub fn map_spectral(&self, m: impl Fn(usize, Complex64) -> Complex64 + Sync) -> Self {
        let s = self.spectral();
        let out = (0..s.len()).into_par_iter().map(|idx| m(idx, s[idx])).collect();
        Self::from_spectral_unchecked(self.grid, out)
    }

    /// New field with values `m(u)`.
    pub fn map_physical(&self, m: impl Fn(f64) -> f64 + Sync) -> Self {
        let out = self.physical().par_iter().map(|&u| m(u)).collect();
        Self::from_physical_unchecked(self.grid, out)
    }

    /// Multiplies coefficients by a real multiplier `m(k₁, k₂)`.
    pub fn apply_multiplier(&self, m: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let g = self.grid;
        self.map_spectral(|idx, c| {
            let (k1, k2) = g.wavevector(idx);
            c * m(k1, k2)
        })
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Config("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Pointwise combination `f(a, b)` in physical space.
    pub fn zip_physical(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        self.check_grid(other)?;
        let (a, b) = (self.physical(), other.physical());
        let out = a.par_iter().zip(b.par_iter()).map(|(&x, &y)| f(x, y)).collect();
        Ok(Self::from_physical_unchecked(self.grid, out))
    }

    /// `a·self + b·other`, computed in whichever representation both share.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_grid(other)?;
        if self.spectral.get().is_some() && other.spectral.get().is_some() {
            let (x, y) = (self.spectral(), other.spectral());
            let out = x.par_iter().zip(y.par_iter()).map(|(&p, &q)| p * a + q * b).collect();
            let spectral = OnceLock::new();
            let _ = spectral.set(Arc::new(out));
            return Ok(Self { grid: self.grid, physical: OnceLock::new(), spectral });
        }
        self.zip_physical(other, |p, q| a * p + b * q)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpby(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        if self.spectral.get().is_some() {
            let out = self.spectral().iter().map(|&c| c * a).collect();
            let spectral = OnceLock::new();
            let _ = spectral.set(Arc::new(out));
            return Self { grid: self.grid, physical: OnceLock::new(), spectral };
        }
        self.map_physical(|u| a * u)
    }

    /// Pointwise product, dealiased with the 2/3 rule.
    pub fn product(&self, other: &Self) -> Result<Self> {
        Ok(self.zip_physical(other, |a, b| a * b)?.dealias())
    }

    /// Zeroes every mode outside the 2/3-rule box.
    pub fn dealias(&self) -> Self {
        let g = self.grid;
        self.map_spectral(|idx, c| if g.is_resolved(idx) { c } else { Complex64::new(0.0, 0.0) })
    }

    /// Grid average `⨍ u`, equal to the `k = 0` coefficient.
    pub fn mean(&self) -> f64 {
        if let Some(s) = self.spectral.get() {
            return s[0].re;
        }
        self.physical().iter().sum::<f64>() / self.grid.len() as f64
    }

    /// `∫ u` over the box.
    pub fn integral(&self) -> f64 {
        self.mean() * self.grid.area()
    }

    /// Subtracts the mean.
    pub fn mean_zero(&self) -> Self {
        let m = self.mean();
        self.map_physical(|u| u - m)
    }

    pub fn linf_norm(&self) -> f64 {
        self.physical().iter().fold(0.0, |m, &u| m.max(u.abs()))
    }

    /// `(h² Σ |u|^p)^{1/p}`, with `p = ∞` allowed.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf_norm();
        }
        let s: f64 = self.physical().iter().map(|u| u.abs().powf(p)).sum();
        (s * self.grid.cell_area()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.physical().iter().map(|u| u * u).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    /// `L²` norm from coefficients, `L (Σ |û|²)^{1/2}`.
    pub fn l2_norm_spectral(&self) -> f64 {
        let s: f64 = self.spectral().iter().map(|c| c.norm_sqr()).sum();
        self.grid.box_length() * s.sqrt()
    }

    /// Sobolev norm `L (Σ (1+|k|²)^s |û|²)^{1/2}`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        let g = self.grid;
        let sum: f64 = self
            .spectral()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let k = g.wavevector_norm(idx);
                (1.0 + k * k).powf(s) * c.norm_sqr()
            })
            .sum();
        g.box_length() * sum.sqrt()
    }

    /// `L²` inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        let s: f64 = self.physical().iter().zip(other.physical()).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.cell_area())
    }

    /// Value at flat index.
    #[inline]
    pub fn at(&self, idx: usize) -> f64 {
        self.physical()[idx]
    }

    /// Largest coefficient deviation `max |âₖ − b̂ₖ|`.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.spectral().iter().zip(other.spectral()).fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    /// Largest pointwise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.physical().iter().zip(other.physical()).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Two-component velocity field on a shared grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub v1: SpectralField,
    pub v2: SpectralField,
}

impl VectorField {
    pub fn new(v1: SpectralField, v2: SpectralField) -> Result<Self> {
        if v1.grid() != v2.grid() {
            return config("vector components live on different grids");
        }
        Ok(Self { v1, v2 })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { v1: SpectralField::zeros(grid), v2: SpectralField::zeros(grid) }
    }

    pub fn grid(&self) -> Grid {
        self.v1.grid()
    }

    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        Ok(Self { v1: self.v1.axpby(a, &other.v1, b)?, v2: self.v2.axpby(a, &other.v2, b)? })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpby(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { v1: self.v1.scale(a), v2: self.v2.scale(a) }
    }

    pub fn map_components(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Self {
        Self { v1: f(&self.v1), v2: f(&self.v2) }
    }

    pub fn dealias(&self) -> Self {
        self.map_components(SpectralField::dealias)
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> SpectralField {
        self.v1.zip_physical(&self.v2, f64::hypot).expect("shared grid")
    }

    /// `sup |v|`.
    pub fn linf_norm(&self) -> f64 {
        self.v1.physical().iter().zip(self.v2.physical()).fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// `(‖v₁‖²_{L²} + ‖v₂‖²_{L²})^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.v1.l2_norm().hypot(self.v2.l2_norm())
    }

    /// `‖|v|‖_{L^p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.magnitude().lp_norm(p)
    }

    pub fn hs_norm(&self, s: f64) -> f64 {
        self.v1.hs_norm(s).hypot(self.v2.hs_norm(s))
    }

    /// Largest coefficient deviation over both components.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.v1.max_coeff_diff(&other.v1)?.max(self.v2.max_coeff_diff(&other.v2)?))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.v1.max_abs_diff(&other.v1)?.max(self.v2.max_abs_diff(&other.v2)?))
    }
}
