use std::f64::consts::PI;

use crate::error::{config, Result};

/// Default side length of the periodic box, `2π·4`.
pub const DEFAULT_BOX_LENGTH: f64 = 8.0 * PI;

/// Uniform `n × n` grid on the torus `[0, L)²`.
///
/// Point `(i, j)` sits at `x = (i·h, j·h)` and is stored at `i·n + j`.
/// Spectral index `(a, b)` carries the wavevector
/// `k = (2π/L)·(signed(a), signed(b))` with `signed(m) ∈ (−n/2, n/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return config(format!("grid size must be a power of two >= 8, got {n}"));
        }
        if !(box_length.is_finite() && box_length > 2.0) {
            return config(format!("box length must exceed 2, got {box_length}"));
        }
        Ok(Self { n, box_length })
    }

    /// Grid on the default `8π` box.
    pub fn with_default_box(n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_BOX_LENGTH)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Grid spacing `h = L/n`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Number of grid points, `n²`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Area element `h²` used by every quadrature on the grid.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.box_length * self.box_length
    }

    /// Signed frequency index of storage index `m`.
    #[inline]
    pub fn signed_index(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m <= n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Storage index of the frequency `−m` for storage index `m`.
    #[inline]
    pub fn mirror_index(&self, m: usize) -> usize {
        (self.n - m) % self.n
    }

    /// Fundamental wavenumber `2π/L`.
    #[inline]
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Physical wavenumber of storage index `m`.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> f64 {
        self.k0() * self.signed_index(m) as f64
    }

    #[inline]
    pub fn is_nyquist(&self, m: usize) -> bool {
        m == self.n / 2
    }

    /// Wavevector `(k₁, k₂)` at flat spectral index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        (self.wavenumber(idx / self.n), self.wavenumber(idx % self.n))
    }

    /// `|k|` at flat spectral index `idx`.
    #[inline]
    pub fn wavevector_norm(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavevector(idx);
        k1.hypot(k2)
    }

    /// Flat index of `−k`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let n = self.n;
        self.mirror_index(idx / n) * n + self.mirror_index(idx % n)
    }

    /// Coordinate of grid index `i` in `[0, L)`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Coordinate of grid index `i` wrapped to `[−L/2, L/2)`, so that the
    /// origin sits at index 0 and data can be centered on it.
    #[inline]
    pub fn centered_coord(&self, i: usize) -> f64 {
        let x = self.coord(i);
        if x >= 0.5 * self.box_length {
            x - self.box_length
        } else {
            x
        }
    }

    /// Centered position of flat index `idx`.
    #[inline]
    pub fn centered_point(&self, idx: usize) -> (f64, f64) {
        (self.centered_coord(idx / self.n), self.centered_coord(idx % self.n))
    }

    /// Signed periodic displacement `a − b` wrapped to `[−L/2, L/2)`.
    #[inline]
    pub fn wrap_delta(&self, d: f64) -> f64 {
        let l = self.box_length;
        d - l * (d / l + 0.5).floor()
    }

    /// Torus distance between two points.
    #[inline]
    pub fn torus_distance(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        self.wrap_delta(a.0 - b.0).hypot(self.wrap_delta(a.1 - b.1))
    }

    /// Largest signed index kept by the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        self.n as i64 / 3
    }

    /// Whether flat spectral index `idx` survives the 2/3 rule.
    #[inline]
    pub fn is_resolved(&self, idx: usize) -> bool {
        let c = self.dealias_cutoff();
        self.signed_index(idx / self.n).abs() <= c && self.signed_index(idx % self.n).abs() <= c
    }

    /// Largest per-axis wavenumber surviving dealiasing.
    #[inline]
    pub fn k_max_dealiased(&self) -> f64 {
        self.k0() * self.dealias_cutoff() as f64
    }

    /// Largest `|k|` represented on the grid (the corner mode).
    pub fn k_max_corner(&self) -> f64 {
        self.k0() * (self.n as f64 / 2.0) * std::f64::consts::SQRT_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(12, 10.0).is_err());
        assert!(Grid::new(4, 10.0).is_err());
        assert!(Grid::new(16, 2.0).is_err());
        assert!(Grid::new(16, 2.5).is_ok());
    }

    #[test]
    fn indices_and_mirrors() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let signed: Vec<i64> = (0..8).map(|m| g.signed_index(m)).collect();
        assert_eq!(signed, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.mirror_index(0), 0);
        assert_eq!(g.mirror_index(1), 7);
        assert_eq!(g.mirror_index(4), 4);
        assert!((g.wavenumber(7) + 1.0).abs() < 1e-15);
        assert!((g.centered_coord(7) + g.spacing()).abs() < 1e-12);
    }

    #[test]
    fn wrap_delta_is_periodic() {
        let g = Grid::new(16, 4.0).unwrap();
        assert!((g.wrap_delta(3.5) + 0.5).abs() < 1e-12);
        assert!((g.wrap_delta(-3.5) - 0.5).abs() < 1e-12);
        assert!((g.torus_distance((0.1, 0.1), (3.9, 3.9)) - 0.2 * 2f64.sqrt()).abs() < 1e-12);
    }
}
