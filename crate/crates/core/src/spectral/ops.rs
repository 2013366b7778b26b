//! Spectral differential operators.

use num_complex::Complex64;

use super::field::{SpectralField, VectorField};
use crate::error::{precondition, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `∂ⱼ f` with `j ∈ {0, 1}`.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let g = f.grid();
    f.map_spectral(|idx, c| {
        let (k1, k2) = g.wavevector(idx);
        I * c * if axis == 0 { k1 } else { k2 }
    })
}

pub fn gradient(f: &SpectralField) -> VectorField {
    VectorField { v1: partial(f, 0), v2: partial(f, 1) }
}

/// `∇^⊥ f = (−∂₂ f, ∂₁ f)`.
pub fn perp_gradient(f: &SpectralField) -> VectorField {
    VectorField { v1: partial(f, 1).scale(-1.0), v2: partial(f, 0) }
}

pub fn divergence(v: &VectorField) -> SpectralField {
    let g = v.grid();
    let (a, b) = (v.v1.spectral(), v.v2.spectral());
    let coeffs = (0..g.len())
        .map(|idx| {
            let (k1, k2) = g.wavevector(idx);
            I * (a[idx] * k1 + b[idx] * k2)
        })
        .collect();
    SpectralField::from_spectral_unchecked(g, coeffs)
}

/// Scalar vorticity `∂₁v₂ − ∂₂v₁`.
pub fn curl2d(v: &VectorField) -> SpectralField {
    let g = v.grid();
    let (a, b) = (v.v1.spectral(), v.v2.spectral());
    let coeffs = (0..g.len())
        .map(|idx| {
            let (k1, k2) = g.wavevector(idx);
            I * (b[idx] * k1 - a[idx] * k2)
        })
        .collect();
    SpectralField::from_spectral_unchecked(g, coeffs)
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.apply_multiplier(|k1, k2| -(k1 * k1 + k2 * k2))
}

/// `Δ⁻¹ f` with the zero mode set to 0.
pub fn inverse_laplacian(f: &SpectralField) -> SpectralField {
    f.apply_multiplier(|k1, k2| {
        let k2n = k1 * k1 + k2 * k2;
        if k2n == 0.0 {
            0.0
        } else {
            -1.0 / k2n
        }
    })
}

/// Leray decomposition `v = Pv + Qv` with `Qv = ∇Δ⁻¹div v`.
///
/// `Pv` is formed as `v − Qv` coefficientwise, so the sum is exact.
pub fn leray_decompose(v: &VectorField) -> (VectorField, VectorField) {
    let g = v.grid();
    let (a, b) = (v.v1.spectral(), v.v2.spectral());
    let n = g.len();
    let mut q1 = vec![ZERO; n];
    let mut q2 = vec![ZERO; n];
    let mut p1 = vec![ZERO; n];
    let mut p2 = vec![ZERO; n];
    for idx in 0..n {
        let (k1, k2) = g.wavevector(idx);
        let kk = k1 * k1 + k2 * k2;
        if kk > 0.0 {
            let dot = (a[idx] * k1 + b[idx] * k2) / kk;
            q1[idx] = dot * k1;
            q2[idx] = dot * k2;
        }
        p1[idx] = a[idx] - q1[idx];
        p2[idx] = b[idx] - q2[idx];
    }
    let mk = |c| SpectralField::from_spectral_unchecked(g, c);
    (VectorField { v1: mk(p1), v2: mk(p2) }, VectorField { v1: mk(q1), v2: mk(q2) })
}

/// Leray projector `P`.
pub fn leray_p(v: &VectorField) -> VectorField {
    leray_decompose(v).0
}

/// Compressible part `Q = I − P`.
pub fn leray_q(v: &VectorField) -> VectorField {
    leray_decompose(v).1
}

/// Velocity `∇^⊥Δ⁻¹ω` of a mean-zero vorticity.
pub fn biot_savart(omega: &SpectralField) -> Result<VectorField> {
    let mean = omega.mean();
    if mean.abs() > 1e-10 * omega.linf_norm().max(1.0) {
        return precondition(format!("vorticity must have zero mean on the torus, mean = {mean:e}"));
    }
    Ok(perp_gradient(&inverse_laplacian(omega)))
}

/// `|D|^s f`; for `s < 0` the zero mode is dropped and `f` must be mean-zero.
pub fn fractional_d(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s < 0.0 {
        let mean = f.mean();
        if mean.abs() > 1e-10 * f.linf_norm().max(1.0) {
            return precondition(format!("|D|^{s} needs a mean-zero field, mean = {mean:e}"));
        }
    }
    Ok(f.apply_multiplier(|k1, k2| {
        let k = k1.hypot(k2);
        if k == 0.0 {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            k.powf(s)
        }
    }))
}

/// `v·∇f`, dealiased.
pub fn advect(v: &VectorField, f: &SpectralField) -> Result<SpectralField> {
    let df = gradient(f);
    let p = v.v1.zip_physical(&df.v1, |a, b| a * b)?;
    let q = v.v2.zip_physical(&df.v2, |a, b| a * b)?;
    Ok(p.add(&q)?.dealias())
}

/// Supremum of the Euclidean operator entries of `∇v`, taken as
/// `max_x max_{i,j} |∂ⱼvᵢ(x)|`.
pub fn grad_linf(v: &VectorField) -> f64 {
    [partial(&v.v1, 0), partial(&v.v1, 1), partial(&v.v2, 0), partial(&v.v2, 1)]
        .iter()
        .map(SpectralField::linf_norm)
        .fold(0.0, f64::max)
}

/// Frobenius-norm `L^p` of `∇v`: `‖|∇v|‖_{L^p}`.
pub fn grad_lp(v: &VectorField, p: f64) -> f64 {
    let parts = [partial(&v.v1, 0), partial(&v.v1, 1), partial(&v.v2, 0), partial(&v.v2, 1)];
    let g = v.grid();
    let vals: Vec<f64> = (0..g.len()).map(|i| parts.iter().map(|f| f.at(i).powi(2)).sum::<f64>().sqrt()).collect();
    SpectralField::from_physical_unchecked(g, vals).lp_norm(p)
}
