//! Numerical laboratory for the low Mach number limit of the 2D isentropic
//! compressible Euler equations with vorticity in weighted BMO spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`] periodic grids, FFT-backed fields, differential operators.
//! * [`littlewood_paley`] dyadic blocks and Besov norms.
//! * [`funcspaces`] ball-sampled BMO/BMO_F/LMO_F and log-Lipschitz norms,
//!   admissible weights, Osgood functionals and Whitney coverings.
//! * [`initial_data`] vortex profiles, cutoffs, mollifiers and the
//!   ill-prepared data families.
//! * [`compressible`] and [`incompressible`] time integrators.
//! * [`flow`] particle flow maps, Jacobians and transport reconstruction.
//! * [`harness`] configuration, ε-sweeps, slope fits and report emission.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compressible;
pub mod error;
pub mod flow;
pub mod funcspaces;
pub mod harness;
pub mod incompressible;
pub mod initial_data;
pub mod io;
pub mod littlewood_paley;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Grid, SpectralField, VectorField};
