//! The transport formula `f(t, x) = f₀(ψ⁻¹(t, x)) exp(−∫₀^t div v(τ, ψ(τ, ψ⁻¹(t, x))) dτ)`.

use super::history::{interpolate, VelocityHistory};
use super::map::{inverse_flow, FlowOptions};
use crate::error::{config, Result};
use crate::spectral::{Grid, SpectralField};

/// Grid nodes in centered coordinates, in storage order.
pub fn grid_points(grid: Grid) -> Vec<(f64, f64)> {
    (0..grid.len()).map(|idx| grid.centered_point(idx)).collect()
}

/// Output of [`transport_reconstruct`].
#[derive(Debug, Clone)]
pub struct Transported {
    pub field: SpectralField,
    /// Backward trajectories that left the fundamental box (wrapped).
    pub flagged: usize,
}

/// Solves `∂_t f + div(f v) = 0` along characteristics, sampling `f₀` at
/// the backward feet `φ(0, t, x)` of the grid nodes.
pub fn transport_reconstruct(
    f0: &SpectralField,
    history: &VelocityHistory,
    t: f64,
    opts: &FlowOptions,
) -> Result<Transported> {
    let g = history.grid();
    if f0.grid() != g {
        return config("initial field and velocity history live on different grids");
    }
    let pts = grid_points(g);
    let back = inverse_flow(history, &pts, t, opts)?;
    let vals: Vec<f64> =
        back.images.iter().zip(&back.div_integral).map(|(&(x, y), &i)| interpolate(f0, x, y) * (-i).exp()).collect();
    Ok(Transported {
        field: SpectralField::from_physical(g, vals)?,
        flagged: back.flagged.iter().filter(|&&f| f).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{leray_p, random, VectorField};
    use std::f64::consts::PI;

    #[test]
    fn zero_velocity_returns_initial_field() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let f0 = random::smooth(g, &mut random::rng(1), 4.0);
        let h = VelocityHistory::steady(&VectorField::zeros(g)).unwrap();
        let f = transport_reconstruct(&f0, &h, 0.7, &FlowOptions::default()).unwrap();
        assert!(f.field.max_abs_diff(&f0).unwrap() < 1e-12);
        assert_eq!(f.flagged, 0);
    }

    #[test]
    fn solenoidal_transport_preserves_lp_norms() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let mut r = random::rng(2);
        let v = leray_p(&random::smooth_vector(g, &mut r, 3.0));
        let v = v.scale(1.0 / v.linf_norm());
        let f0 = random::smooth(g, &mut r, 4.0);
        let h = VelocityHistory::steady(&v).unwrap();
        let f = transport_reconstruct(&f0, &h, 1.0, &FlowOptions::default()).unwrap().field;
        for p in [1.5, 2.0, 4.0] {
            assert!((f.lp_norm(p) / f0.lp_norm(p) - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn compressible_transport_conserves_mass() {
        // f solves a continuity equation, so its integral is invariant
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let mut r = random::rng(3);
        let v = random::smooth_vector(g, &mut r, 3.0);
        let v = v.scale(0.5 / v.linf_norm());
        let f0 = random::smooth(g, &mut r, 4.0).map_physical(|x| x + 3.0);
        let h = VelocityHistory::steady(&v).unwrap();
        let f = transport_reconstruct(&f0, &h, 1.0, &FlowOptions::default()).unwrap().field;
        assert!((f.integral() / f0.integral() - 1.0).abs() < 1e-4);
    }
}
