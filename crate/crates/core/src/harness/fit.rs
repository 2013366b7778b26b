//! Least-squares power-law fits on log-log data.

use crate::error::{precondition, Result};

/// Fewest points for a fit that is not flagged inconclusive.
pub const MIN_FIT_POINTS: usize = 4;
/// Largest RMS log-residual for a conclusive fit.
pub const MAX_RESIDUAL: f64 = 0.5;

/// `y ≈ e^{intercept} x^{slope}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of `ln y`.
    pub residual: f64,
    pub points: usize,
}

impl PowerFit {
    pub fn inconclusive(&self) -> bool {
        self.points < MIN_FIT_POINTS || self.residual > MAX_RESIDUAL || !self.slope.is_finite()
    }
}

/// Fits `ln y = a + b ln x` by least squares. Needs at least two points
/// with positive coordinates and distinct `x`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if x.len() != y.len() {
        return precondition("fit needs equally many x and y values");
    }
    if x.len() < 2 {
        return precondition(format!("fit needs at least 2 points, got {}", x.len()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return precondition("log-log fit needs positive finite data");
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return precondition("fit needs at least two distinct x values");
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(PowerFit { slope, intercept, residual: (ss / n).sqrt(), points: x.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12 && !f.inconclusive());
    }

    #[test]
    fn short_or_noisy_fits_are_inconclusive() {
        let f = fit_power_law(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert!(f.inconclusive());
        let g = fit_power_law(&[1.0, 2.0, 3.0, 4.0], &[1.0, 100.0, 0.01, 1.0]).unwrap();
        assert!(g.inconclusive());
        assert!(fit_power_law(&[1.0], &[1.0]).is_err());
        assert!(fit_power_law(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0], &[0.0, 2.0]).is_err());
    }
}
