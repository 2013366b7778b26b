//! Initial data: LBMO vortices, cutoffs, mollifiers and ill-prepared
//! compressible data families.

use rand::Rng;

use crate::error::{config, Result};
use crate::spectral::{self, biot_savart, curl2d, Grid, SpectralField, VectorField};

/// Smooth radial cutoff: 1 on `r ≤ 1`, 0 on `r ≥ 2`.
pub fn cutoff(r: f64) -> f64 {
    crate::littlewood_paley::chi(0.5 * r)
}

/// Radial derivative of [`cutoff`], by central differences of the exact profile.
pub fn cutoff_derivative(r: f64) -> f64 {
    if !(1.0..=2.0).contains(&r) {
        return 0.0;
    }
    let d = 1e-6;
    (cutoff(r + d) - cutoff(r - d)) / (2.0 * d)
}

/// Unnormalized mollifier profile `exp(−1/(1 − r²))` on `r < 1`.
pub fn mollifier_profile(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// `ln(1 + ln(a / max(|x|, core)))` on `|x| ≤ a`, 0 outside.
pub fn lbmo_profile(r: f64, scale: f64, core: f64) -> f64 {
    if r > scale {
        0.0
    } else {
        (scale / r.max(core)).ln().ln_1p()
    }
}

/// The unbounded LBMO example `ln(1 + ln(1/|x|))` on the unit disc, clamped
/// below `|x| = 2h` and mean-corrected.
pub fn lbmo_vortex(grid: Grid) -> Result<SpectralField> {
    let h = grid.spacing();
    if h > 1.0 / 64.0 {
        return config(format!("lbmo_vortex needs spacing h ≤ 1/64, got {h}"));
    }
    Ok(SpectralField::from_fn_centered(grid, |x, y| lbmo_profile(x.hypot(y), 1.0, 2.0 * h)).mean_zero())
}

/// Rescaled LBMO vortex of radius `scale` with a clamped core, for grids
/// too coarse for [`lbmo_vortex`].
pub fn lbmo_vortex_scaled(grid: Grid, scale: f64, core: f64) -> SpectralField {
    SpectralField::from_fn_centered(grid, |x, y| lbmo_profile(x.hypot(y), scale, core.max(grid.spacing()))).mean_zero()
}

/// Discrete `ρ_k` as a field centered at the origin, with unit sum.
pub fn mollifier_kernel(grid: Grid, k: u32) -> SpectralField {
    let kf = k.max(1) as f64;
    let w = SpectralField::from_fn_centered(grid, |x, y| mollifier_profile(kf * x.hypot(y)));
    let sum: f64 = w.physical().iter().sum();
    w.scale(1.0 / sum)
}

/// `ρ_k ∗ f` by spectral multiplication.
pub fn mollify(f: &SpectralField, k: u32) -> SpectralField {
    let g = f.grid();
    let kernel = mollifier_kernel(g, k);
    let nn = g.len() as f64;
    let kh = kernel.spectral().to_vec();
    f.map_spectral(|idx, c| c * kh[idx] * nn)
}

fn check_cutoff_radius(grid: Grid, r: f64, extra: f64) -> Result<()> {
    if !(r > 0.0) || 2.0 * r + extra > 0.5 * grid.box_length() {
        return config(format!(
            "cutoff radius {r} does not fit: support 2R + {extra:.3} must stay below L/2 = {}",
            0.5 * grid.box_length()
        ));
    }
    Ok(())
}

/// `χ(·/R) v` pointwise.
pub fn truncate(v: &VectorField, r: f64) -> Result<VectorField> {
    check_cutoff_radius(v.grid(), r, 0.0)?;
    let g = v.grid();
    let chi = SpectralField::from_fn_centered(g, |x, y| cutoff(x.hypot(y) / r));
    Ok(VectorField { v1: v.v1.zip_physical(&chi, |a, b| a * b)?, v2: v.v2.zip_physical(&chi, |a, b| a * b)? })
}

/// `ρ_k ∗ (χ(·/R) v)`.
pub fn mollify_cutoff(v: &VectorField, k: u32, r: f64) -> Result<VectorField> {
    check_cutoff_radius(v.grid(), r, 1.0 / k.max(1) as f64)?;
    let t = truncate(v, r)?;
    Ok(t.map_components(|c| mollify(c, k)))
}

/// `rot(χ(·/R) v)` with its two summands `χ(·/R) ω` and `(1/R)∇^⊥χ(·/R)·v`.
#[derive(Debug, Clone)]
pub struct TruncationRot {
    pub total: SpectralField,
    pub bulk: SpectralField,
    pub boundary: SpectralField,
}

/// Splits the vorticity of the truncated field. The total is the spectral
/// curl; the boundary summand is evaluated pointwise from the exact
/// cutoff gradient, and the bulk is their difference.
pub fn truncation_rot(v: &VectorField, r: f64) -> Result<TruncationRot> {
    let t = truncate(v, r)?;
    let total = curl2d(&t);
    let g = v.grid();
    let (a, b) = (v.v1.physical(), v.v2.physical());
    let vals = (0..g.len())
        .map(|idx| {
            let (x, y) = g.centered_point(idx);
            let rho = x.hypot(y);
            if rho == 0.0 {
                return 0.0;
            }
            let d = cutoff_derivative(rho / r) / r;
            let (g1, g2) = (d * x / rho, d * y / rho);
            // ∇^⊥χ = (−∂₂χ, ∂₁χ)
            -g2 * a[idx] + g1 * b[idx]
        })
        .collect();
    let boundary = SpectralField::from_physical(g, vals)?;
    let bulk = total.sub(&boundary)?;
    Ok(TruncationRot { total, bulk, boundary })
}

/// Base vorticity of a data family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseProfile {
    /// Rescaled LBMO vortex of the given radius.
    Lbmo { scale: f64 },
    /// Pair of opposite Gaussian vortices.
    GaussianDipole { width: f64, separation: f64 },
    /// Smoothed uniform patch of radius `radius`.
    SmoothPatch { radius: f64 },
}

impl BaseProfile {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lbmo" => Ok(Self::Lbmo { scale: 2.0 }),
            "gaussian_dipole" => Ok(Self::GaussianDipole { width: 0.7, separation: 1.6 }),
            "smooth_patch" => Ok(Self::SmoothPatch { radius: 1.0 }),
            other => config(format!("unknown data profile '{other}'")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lbmo { .. } => "lbmo",
            Self::GaussianDipole { .. } => "gaussian_dipole",
            Self::SmoothPatch { .. } => "smooth_patch",
        }
    }

    /// Mean-zero vorticity on `grid`.
    pub fn vorticity(&self, grid: Grid) -> SpectralField {
        match *self {
            Self::Lbmo { scale } => lbmo_vortex_scaled(grid, scale, 2.0 * grid.spacing()),
            Self::GaussianDipole { width, separation } => {
                let s = 0.5 * separation;
                SpectralField::from_fn_centered(grid, |x, y| {
                    let w2 = width * width;
                    (-(x * x + (y - s).powi(2)) / w2).exp() - (-(x * x + (y + s).powi(2)) / w2).exp()
                })
                .mean_zero()
            }
            Self::SmoothPatch { radius } => {
                SpectralField::from_fn_centered(grid, |x, y| cutoff(x.hypot(y) / radius)).mean_zero()
            }
        }
    }
}

/// Parameters of an ill-prepared data family indexed by `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRecipe {
    pub profile: BaseProfile,
    /// Mollifier index; derived from the budget when `None`.
    pub k: Option<u32>,
    /// Cutoff radius `R`.
    pub cutoff_radius: f64,
    pub epsilon: f64,
    pub s: f64,
    pub alpha: f64,
    /// Budget constant `C₀` in `k^{s+2} R ≤ C₀ (ln ε⁻¹)^α`.
    pub budget: f64,
    /// Amplitude of the `O(1)` sound-speed bump `c₀`.
    pub sound_amplitude: f64,
    /// Amplitude of the gradient part added to `v₀`.
    pub compressible_amplitude: f64,
    pub gamma_bar: f64,
    pub seed: u64,
}

impl Default for DataRecipe {
    fn default() -> Self {
        Self {
            profile: BaseProfile::Lbmo { scale: 2.0 },
            k: None,
            cutoff_radius: 4.0,
            epsilon: 0.1,
            s: 0.5,
            alpha: 0.5,
            budget: 40.0,
            sound_amplitude: 0.5,
            compressible_amplitude: 0.5,
            gamma_bar: 0.2,
            seed: 7,
        }
    }
}

impl DataRecipe {
    /// `C₀ (ln ε⁻¹)^α`.
    pub fn budget_value(&self) -> f64 {
        self.budget * (1.0 / self.epsilon).ln().powf(self.alpha)
    }

    /// Mollifier index honoring the budget.
    pub fn resolve_k(&self) -> Result<u32> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return config(format!("Mach number must lie in (0, 1), got {}", self.epsilon));
        }
        let b = self.budget_value();
        let cost = |k: u32| (k as f64).powf(self.s + 2.0) * self.cutoff_radius;
        match self.k {
            Some(k) if k >= 1 && cost(k) <= b * (1.0 + 1e-12) => Ok(k),
            Some(k) => {
                config(format!("k^(s+2) R = {:.4} exceeds the budget C0 (ln 1/eps)^alpha = {b:.4} (k = {k})", cost(k)))
            }
            None => {
                let k = (b / self.cutoff_radius).powf(1.0 / (self.s + 2.0)).floor() as u32;
                if k == 0 {
                    return config(format!("budget {b:.4} admits no mollifier index for R = {}", self.cutoff_radius));
                }
                Ok(k)
            }
        }
    }
}

/// Generated data with its measured norms.
#[derive(Debug, Clone)]
pub struct IllPreparedData {
    pub v0: VectorField,
    pub c0: SpectralField,
    pub k: u32,
    /// `‖(v₀, c₀)‖_{H^{s+2}}`.
    pub hs2_norm: f64,
    /// `ω₀ = curl v₀`.
    pub omega0: SpectralField,
}

/// Localized random potential: a few seeded Gaussian bumps.
fn random_potential(grid: Grid, seed: u64) -> SpectralField {
    let mut rng = spectral::random::rng(seed);
    let bumps: Vec<(f64, f64, f64)> =
        (0..3).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SpectralField::from_fn_centered(grid, |x, y| {
        bumps.iter().map(|&(a, cx, cy)| a * (-((x - cx).powi(2) + (y - cy).powi(2))).exp()).sum()
    })
}

/// Builds `(v₀ε, c₀ε)`: the velocity of the base vorticity, cut off at `R`
/// and mollified at `k`, plus an `O(1)` gradient part, and an `O(1)`
/// sound-speed bump independent of `ε`.
pub fn ill_prepared_family(grid: Grid, recipe: &DataRecipe) -> Result<IllPreparedData> {
    let k = recipe.resolve_k()?;
    let omega = recipe.profile.vorticity(grid);
    let v = biot_savart(&omega)?;
    let mut v0 = mollify_cutoff(&v, k, recipe.cutoff_radius)?;
    if recipe.compressible_amplitude != 0.0 {
        let grad = spectral::gradient(&random_potential(grid, recipe.seed));
        let m = grad.linf_norm().max(1e-300);
        v0 = v0.add(&grad.scale(recipe.compressible_amplitude / m))?;
    }
    let v0 = VectorField { v1: v0.v1.mean_zero(), v2: v0.v2.mean_zero() }.dealias();
    let c0 = SpectralField::from_fn_centered(grid, |x, y| recipe.sound_amplitude * (-(x * x + y * y)).exp()).dealias();
    let sp = recipe.s + 2.0;
    let hs2_norm = v0.hs_norm(sp).hypot(c0.hs_norm(sp));
    let omega0 = curl2d(&v0);
    Ok(IllPreparedData { v0, c0, k, hs2_norm, omega0 })
}

/// Well-prepared degenerate member: divergence-free velocity, `c₀ = 0`.
pub fn well_prepared(grid: Grid, recipe: &DataRecipe) -> Result<IllPreparedData> {
    let r = DataRecipe { compressible_amplitude: 0.0, sound_amplitude: 0.0, ..recipe.clone() };
    let mut d = ill_prepared_family(grid, &r)?;
    d.v0 = spectral::leray_p(&d.v0);
    d.omega0 = curl2d(&d.v0);
    Ok(d)
}

/// Rigid rotation `x^⊥ χ(|x|/R)`: divergence-free and exact on `|x| ≤ R`.
pub fn localized_rotation(grid: Grid, r: f64) -> VectorField {
    let chi = |x: f64, y: f64| cutoff(x.hypot(y) / r);
    VectorField {
        v1: SpectralField::from_fn_centered(grid, |x, y| -y * chi(x, y)),
        v2: SpectralField::from_fn_centered(grid, |x, y| x * chi(x, y)),
    }
}

/// Frequency-graded cellular flow `∇^⊥ Σ_{j=1}^J m_j⁻² sin(m_j x) sin(m_j y)`
/// with `m_j = 2^j k₀`. Each level adds `O(1)` to `‖∇v‖_∞`, so the family is
/// log-Lipschitz uniformly in `J` but not uniformly Lipschitz.
pub fn graded_velocity(grid: Grid, levels: u32) -> Result<VectorField> {
    let top = 1i64 << levels;
    if levels == 0 || top > grid.dealias_cutoff() {
        return config(format!("{levels} graded levels are not resolved on n = {}", grid.n()));
    }
    let k0 = grid.k0();
    let f = SpectralField::from_fn(grid, |x, y| {
        (1..=levels)
            .map(|j| {
                let m = (1u64 << j) as f64 * k0;
                (m * x).sin() * (m * y).sin() / (m * m)
            })
            .sum()
    });
    Ok(spectral::perp_gradient(&f))
}
