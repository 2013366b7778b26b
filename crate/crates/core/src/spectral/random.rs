//! Seeded random test fields.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::field::{SpectralField, VectorField};
use super::grid::Grid;

/// Deterministic generator used everywhere a seed is configurable.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean-zero real field with random coefficients supported in
/// `k_lo ≤ |k| ≤ k_hi` (physical wavenumbers), spectral amplitude
/// `(1+|k|²)^{−decay/2}`, normalized to unit `L^∞`.
pub fn band_limited<R: Rng>(grid: Grid, rng: &mut R, k_lo: f64, k_hi: f64, decay: f64) -> SpectralField {
    let coeffs: Vec<Complex64> = (0..grid.len())
        .map(|idx| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            let k = grid.wavevector_norm(idx);
            if k == 0.0 || k < k_lo || k > k_hi || !grid.is_resolved(idx) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(re, im) * (1.0 + k * k).powf(-0.5 * decay)
            }
        })
        .collect();
    let f = SpectralField::from_spectral_unchecked(grid, coeffs);
    let m = f.linf_norm();
    if m > 0.0 {
        f.scale(1.0 / m)
    } else {
        f
    }
}

/// Smooth random field: all resolved modes with `|k| ≤ k_hi`.
pub fn smooth<R: Rng>(grid: Grid, rng: &mut R, k_hi: f64) -> SpectralField {
    band_limited(grid, rng, 0.0, k_hi, 2.0)
}

/// Random velocity with independent smooth components.
pub fn smooth_vector<R: Rng>(grid: Grid, rng: &mut R, k_hi: f64) -> VectorField {
    VectorField { v1: smooth(grid, rng, k_hi), v2: smooth(grid, rng, k_hi) }
}
