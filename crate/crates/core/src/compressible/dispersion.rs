//! Whole-space dispersion of the 2D half-wave group on radial data,
//! evaluated by Hankel-transform quadrature.
//!
//! For radial `φ₀`, `e^{it|D|}φ₀(r) = ∫₀^∞ e^{itρ} φ̃(ρ) J₀(ρr) ρ dρ` with
//! `φ̃(ρ) = ∫₀^∞ φ₀(r) J₀(ρr) r dr`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config, Error, Result};
use crate::harness::fit::{fit_power_law, PowerFit};

/// Bessel function `J₀`: power series up to 12, Hankel asymptotics beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 12.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..200 {
            term *= -q / (m as f64 * m as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) && m > 2 {
                break;
            }
        }
        return sum;
    }
    // J₀(x) ~ √(2/(πx)) (P cos χ − Q sin χ), χ = x − π/4, with
    // a_k = Π_{j≤k} (−(2j−1)²) / (k! 8^k)
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..40 {
        let term = a / x.powi(k);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        let j = (k + 1) as f64;
        a *= -((2.0 * j - 1.0).powi(2)) / (j * 8.0);
    }
    let chi = x - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Radial profile and its discretization parameters.
pub struct RadialProfile<'a> {
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
    /// The profile is treated as zero beyond this radius.
    pub support: f64,
    /// Frequency cutoff of the Hankel transform.
    pub rho_max: f64,
}

/// Decay measurements of `‖e^{it|D|}φ₀‖_{L^p}` against `t`.
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Power-law fit over the times in the fit window.
    pub fit: Option<PowerFit>,
}

/// Precomputed quadrature for the half-wave group.
pub struct HalfWave {
    rho: Vec<f64>,
    /// `φ̃(ρ_i) ρ_i w_i` (weights folded in).
    weighted: Vec<f64>,
    r: Vec<f64>,
    r_weights: Vec<f64>,
    /// `J₀(ρ_i r_j)`, row-major in `j`.
    kernel: Vec<f64>,
    profile_at_r: Vec<f64>,
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

impl HalfWave {
    /// Quadrature grids: `ρ ∈ [0, ρ_max]`, `r ∈ [0, r_max]` with spacing `dr`.
    /// The frequency step resolves oscillations of `e^{itρ}J₀(ρr)` up to
    /// `t + r ≤ t_max + r_max`.
    pub fn new(profile: &RadialProfile, r_max: f64, dr: f64, t_max: f64) -> Result<Self> {
        if !(profile.support > 0.0 && profile.rho_max > 0.0 && r_max > 0.0 && dr > 0.0) {
            return config("radial quadrature parameters must be positive");
        }
        // forward transform: Simpson over the support
        let nr0 = (2 * ((profile.support / 0.01).ceil() as usize / 2)).max(200);
        let hr0 = profile.support / nr0 as f64;
        let w0 = simpson_weights(nr0, hr0);
        let r0: Vec<f64> = (0..=nr0).map(|i| i as f64 * hr0).collect();
        let f0: Vec<f64> = r0.iter().map(|&r| (profile.f)(r) * r).collect();
        let hankel =
            |rho: f64| -> f64 { r0.iter().zip(&f0).zip(&w0).map(|((&r, &f), &w)| w * f * bessel_j0(rho * r)).sum() };

        let reach = t_max + r_max.max(profile.support);
        // ≥ 12 points per period 2π/reach
        let mut n_rho = ((profile.rho_max * reach / (2.0 * PI)) * 12.0).ceil() as usize;
        n_rho = (n_rho + n_rho % 2).max(400);
        let h_rho = profile.rho_max / n_rho as f64;
        let rho: Vec<f64> = (0..=n_rho).map(|i| i as f64 * h_rho).collect();
        let w_rho = simpson_weights(n_rho, h_rho);
        let transform: Vec<f64> = rho.par_iter().map(|&p| hankel(p)).collect();
        let peak = transform.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tail = transform[n_rho - n_rho / 20..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !(peak > 0.0) || tail > 1e-8 * peak {
            return Err(Error::Accuracy(format!(
                "Hankel transform not negligible at ρ_max = {} (tail/peak = {:.2e})",
                profile.rho_max,
                tail / peak
            )));
        }
        let weighted: Vec<f64> = (0..=n_rho).map(|i| transform[i] * rho[i] * w_rho[i]).collect();

        let mut nr = (r_max / dr).ceil() as usize;
        nr += nr % 2;
        let h = r_max / nr as f64;
        let r: Vec<f64> = (0..=nr).map(|j| j as f64 * h).collect();
        let r_weights = simpson_weights(nr, h);
        let kernel: Vec<f64> =
            r.par_iter().flat_map_iter(|&rj| rho.iter().map(move |&p| bessel_j0(p * rj)).collect::<Vec<_>>()).collect();
        let profile_at_r: Vec<f64> =
            r.iter().map(|&x| if x <= profile.support { (profile.f)(x) } else { 0.0 }).collect();
        let hw = Self { rho, weighted, r, r_weights, kernel, profile_at_r };
        // inverse transform at t = 0 must reproduce the profile
        let back = hw.evaluate_quadrature(0.0);
        let scale = hw.profile_at_r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let err = back.iter().zip(&hw.profile_at_r).fold(0.0f64, |m, (a, b)| m.max((a.re - b).abs()));
        if err > 1e-6 * scale {
            return Err(Error::Accuracy(format!("Hankel round trip error {err:.2e} exceeds 1e-6 relative")));
        }
        Ok(hw)
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    fn evaluate_quadrature(&self, t: f64) -> Vec<Complex64> {
        let phase: Vec<Complex64> =
            self.rho.iter().zip(&self.weighted).map(|(&p, &w)| Complex64::from_polar(w, t * p)).collect();
        let m = self.rho.len();
        self.kernel
            .par_chunks(m)
            .map(|row| row.iter().zip(&phase).fold(Complex64::new(0.0, 0.0), |s, (k, z)| s + z * k))
            .collect()
    }

    /// `e^{it|D|}φ₀` on the radial grid; exactly `φ₀` at `t = 0`.
    pub fn evaluate(&self, t: f64) -> Vec<Complex64> {
        if t == 0.0 {
            return self.profile_at_r.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        }
        self.evaluate_quadrature(t)
    }

    /// `L^p(ℝ²)` norm of a radial function sampled on the radial grid.
    pub fn lp_norm(&self, u: &[Complex64], p: f64) -> f64 {
        if p.is_infinite() {
            return u.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        }
        let s: f64 =
            u.iter().zip(&self.r).zip(&self.r_weights).map(|((z, &r), &w)| w * 2.0 * PI * r * z.norm().powf(p)).sum();
        s.powf(1.0 / p)
    }
}

/// Evaluates `‖e^{it|D|}φ₀‖_{L^p}` at each `t` and fits the decay exponent
/// over `t ∈ fit_window`.
pub fn radial_free_wave_decay(
    profile: &RadialProfile,
    t_list: &[f64],
    p: f64,
    fit_window: (f64, f64),
) -> Result<DecayReport> {
    if t_list.iter().any(|&t| t < 0.0 || !t.is_finite()) {
        return config("times must be finite and nonnegative");
    }
    if !(p >= 1.0) {
        return config(format!("p must be at least 1, got {p}"));
    }
    let t_max = t_list.iter().cloned().fold(0.0, f64::max);
    let hw = HalfWave::new(profile, t_max + profile.support + 10.0, 0.05, t_max)?;
    let norms: Vec<f64> = t_list.iter().map(|&t| hw.lp_norm(&hw.evaluate(t), p)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = t_list
        .iter()
        .zip(&norms)
        .filter(|(&t, _)| t >= fit_window.0 && t <= fit_window.1)
        .map(|(&t, &n)| (t, n))
        .unzip();
    let fit = fit_power_law(&xs, &ys).ok();
    Ok(DecayReport { times: t_list.to_vec(), norms, fit })
}

/// `‖e^{i(t/ε)|D|}φ₀‖_{L⁴([0,1]; L^∞)}` for each `ε`, with the fitted
/// exponent of its power law in `ε`.
pub fn strichartz_scaling(
    profile: &RadialProfile,
    eps_list: &[f64],
    dtau: f64,
) -> Result<(Vec<f64>, Option<PowerFit>)> {
    if eps_list.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return config("ε values must lie in (0, 1]");
    }
    let tau_max = eps_list.iter().map(|e| 1.0 / e).fold(0.0, f64::max);
    let hw = HalfWave::new(profile, tau_max + profile.support + 10.0, 0.05, tau_max)?;
    let m = (tau_max / dtau).ceil() as usize;
    let taus: Vec<f64> = (0..=m).map(|i| (i as f64 * dtau).min(tau_max)).collect();
    let sup4: Vec<f64> = taus.par_iter().map(|&t| hw.lp_norm(&hw.evaluate(t), f64::INFINITY).powi(4)).collect();
    // ∫₀¹ ‖φ(t/ε)‖⁴ dt = ε ∫₀^{1/ε} ‖φ(τ)‖⁴ dτ
    let values: Vec<f64> = eps_list
        .iter()
        .map(|&e| {
            let end = 1.0 / e;
            let (mut s, mut k) = (0.0, 0);
            while k < m && taus[k + 1] <= end + 1e-12 {
                s += 0.5 * (taus[k + 1] - taus[k]) * (sup4[k] + sup4[k + 1]);
                k += 1;
            }
            (e * s).powf(0.25)
        })
        .collect();
    let fit = fit_power_law(eps_list, &values).ok();
    Ok((values, fit))
}
