//! Periodic grids, spectral fields and differential operators.

mod fft;
mod field;
mod grid;
pub mod ops;
pub mod random;

pub use field::{Direction, SpectralField, VectorField};
pub use grid::{Grid, DEFAULT_BOX_LENGTH};
pub use ops::{
    advect, biot_savart, curl2d, divergence, fractional_d, grad_linf, grad_lp, gradient, inverse_laplacian, laplacian,
    leray_decompose, leray_p, leray_q, partial, perp_gradient,
};
