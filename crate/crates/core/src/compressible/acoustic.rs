//! Acoustic variables and the exact propagator of the stiff linear part.
//!
//! With `k̂ = k/|k|` and `u = k̂·v̂`, the linear part couples only `u` and
//! `ĉ`, and `Γ̂ = k̂(u + ĉ)`, `Υ̂ = i(u + ĉ)` evolve by `e^{−i t|k|/ε}`.
//! The opposite combination `u − ĉ` at `k` is `−conj(u + ĉ)` at `−k`.

use num_complex::Complex64;

use super::state::CompressibleState;
use crate::spectral::{Grid, SpectralField, VectorField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Spectral coefficients of `Γ = Qv − i∇|D|⁻¹c` and `Υ = |D|⁻¹div v + ic`.
///
/// These are complex fields, so their coefficients carry no reality
/// symmetry. The zero mode of `c` is kept aside.
#[derive(Debug, Clone)]
pub struct AcousticVariables {
    pub grid: Grid,
    pub gamma1: Vec<Complex64>,
    pub gamma2: Vec<Complex64>,
    pub upsilon: Vec<Complex64>,
    pub c_mean: f64,
}

impl AcousticVariables {
    /// `Σ_k |Γ̂|² + |Υ̂|²`.
    pub fn l2_coeff_norm(&self) -> f64 {
        self.gamma1.iter().chain(&self.gamma2).chain(&self.upsilon).map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every coefficient by `e^{−i dt |k|/ε}`.
    pub fn propagate(&self, dt: f64, epsilon: f64) -> Self {
        let g = self.grid;
        let phase: Vec<Complex64> =
            (0..g.len()).map(|idx| Complex64::from_polar(1.0, -dt * g.wavevector_norm(idx) / epsilon)).collect();
        let mul = |a: &[Complex64]| a.iter().zip(&phase).map(|(x, p)| x * p).collect();
        Self {
            grid: g,
            gamma1: mul(&self.gamma1),
            gamma2: mul(&self.gamma2),
            upsilon: mul(&self.upsilon),
            c_mean: self.c_mean,
        }
    }

    /// `w(k) = (u + ĉ)(k)` recovered from `Υ̂ = i w`.
    fn w(&self, idx: usize) -> Complex64 {
        -I * self.upsilon[idx]
    }

    /// Recovers `(Qv, c)`; the inverse of [`gamma_upsilon`] on its range.
    pub fn reconstruct(&self) -> (VectorField, SpectralField) {
        let g = self.grid;
        let n = g.len();
        let mut q1 = vec![ZERO; n];
        let mut q2 = vec![ZERO; n];
        let mut c = vec![ZERO; n];
        for idx in 0..n {
            let k = g.wavevector_norm(idx);
            if k == 0.0 {
                continue;
            }
            let (k1, k2) = g.wavevector(idx);
            let (w, wm) = (self.w(idx), self.w(g.mirror(idx)).conj());
            let u = 0.5 * (w - wm);
            c[idx] = 0.5 * (w + wm);
            q1[idx] = u * (k1 / k);
            q2[idx] = u * (k2 / k);
        }
        c[0] = Complex64::new(self.c_mean, 0.0);
        (
            VectorField {
                v1: SpectralField::from_spectral_unchecked(g, q1),
                v2: SpectralField::from_spectral_unchecked(g, q2),
            },
            SpectralField::from_spectral_unchecked(g, c),
        )
    }

    /// Physical values of `Re Γ`, which equals `Qv`.
    pub fn gamma_real_part(&self) -> VectorField {
        let g = self.grid;
        let re = |a: &[Complex64]| {
            let s: Vec<Complex64> = (0..g.len()).map(|i| 0.5 * (a[i] + a[g.mirror(i)].conj())).collect();
            SpectralField::from_spectral_unchecked(g, s)
        };
        VectorField { v1: re(&self.gamma1), v2: re(&self.gamma2) }
    }
}

/// `(Γ_ε, Υ_ε)` of a state.
pub fn gamma_upsilon(state: &CompressibleState) -> AcousticVariables {
    let g = state.grid();
    let (a, b, c) = (state.v.v1.spectral(), state.v.v2.spectral(), state.c.spectral());
    let n = g.len();
    let mut gamma1 = vec![ZERO; n];
    let mut gamma2 = vec![ZERO; n];
    let mut upsilon = vec![ZERO; n];
    for idx in 0..n {
        let k = g.wavevector_norm(idx);
        if k == 0.0 {
            continue;
        }
        let (k1, k2) = g.wavevector(idx);
        let (e1, e2) = (k1 / k, k2 / k);
        let w = a[idx] * e1 + b[idx] * e2 + c[idx];
        gamma1[idx] = w * e1;
        gamma2[idx] = w * e2;
        upsilon[idx] = I * w;
    }
    AcousticVariables { grid: g, gamma1, gamma2, upsilon, c_mean: c[0].re }
}

/// Exact solution operator of `∂_t v + ε⁻¹∇c = 0`, `∂_t c + ε⁻¹div v = 0`
/// over `dt` (negative `dt` runs backwards). `Pv` is untouched.
pub fn acoustic_propagator(state: &CompressibleState, dt: f64) -> CompressibleState {
    let g = state.grid();
    let (a, b, c) = (state.v.v1.spectral(), state.v.v2.spectral(), state.c.spectral());
    let n = g.len();
    let mut v1 = a.to_vec();
    let mut v2 = b.to_vec();
    let mut cc = c.to_vec();
    for idx in 0..n {
        let k = g.wavevector_norm(idx);
        if k == 0.0 {
            continue;
        }
        let (k1, k2) = g.wavevector(idx);
        let (e1, e2) = (k1 / k, k2 / k);
        let u = a[idx] * e1 + b[idx] * e2;
        let (s, co) = (dt * k / state.epsilon).sin_cos();
        let u_new = u * co - I * c[idx] * s;
        cc[idx] = c[idx] * co - I * u * s;
        let du = u_new - u;
        v1[idx] += du * e1;
        v2[idx] += du * e2;
    }
    let mut out = state.with_fields(
        VectorField {
            v1: SpectralField::from_spectral_unchecked(g, v1),
            v2: SpectralField::from_spectral_unchecked(g, v2),
        },
        SpectralField::from_spectral_unchecked(g, cc),
    );
    out.t = state.t + dt;
    out
}
