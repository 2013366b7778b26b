use crate::error::{config, Result};
use crate::spectral::{Grid, SpectralField, VectorField};

/// Velocity and sound-speed perturbation of the rescaled system at one instant.
#[derive(Debug, Clone)]
pub struct CompressibleState {
    pub v: VectorField,
    pub c: SpectralField,
    pub epsilon: f64,
    pub gamma_bar: f64,
    pub t: f64,
}

impl CompressibleState {
    pub fn new(v: VectorField, c: SpectralField, epsilon: f64, gamma_bar: f64) -> Result<Self> {
        if v.grid() != c.grid() {
            return config("velocity and sound speed live on different grids");
        }
        if !(epsilon > 0.0 && epsilon < 1.0 + 1e-12) {
            return config(format!("Mach number must lie in (0, 1], got {epsilon}"));
        }
        if !gamma_bar.is_finite() {
            return config("gamma_bar must be finite");
        }
        Ok(Self { v, c, epsilon, gamma_bar, t: 0.0 })
    }

    pub fn zeros(grid: Grid, epsilon: f64, gamma_bar: f64) -> Result<Self> {
        Self::new(VectorField::zeros(grid), SpectralField::zeros(grid), epsilon, gamma_bar)
    }

    pub fn grid(&self) -> Grid {
        self.c.grid()
    }

    /// Same state with new fields, keeping parameters and time.
    pub fn with_fields(&self, v: VectorField, c: SpectralField) -> Self {
        Self { v, c, ..self.clone() }
    }

    /// `‖(v, c)‖_{H^s}`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.v.hs_norm(s).hypot(self.c.hs_norm(s))
    }

    /// Largest coefficient deviation from another state.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.v.max_coeff_diff(&other.v)?.max(self.c.max_coeff_diff(&other.c)?))
    }
}
