//! Cached 2D complex FFTs on square power-of-two grids.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;

fn plans() -> &'static Mutex<HashMap<(usize, bool), Plan>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    PLANS.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plan(n: usize, inverse: bool) -> Plan {
    let mut cache = plans().lock().expect("fft plan cache poisoned");
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

fn rows(data: &mut [Complex64], n: usize, fft: &Plan) {
    // blocks of rows keep scratch allocation per task small
    let block = n * 16.min(n);
    data.par_chunks_mut(block).for_each(|chunk| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// Unnormalized 2D transform in place. Row-major `n × n` layout.
pub(crate) fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n);
    let fft = plan(n, inverse);
    rows(data, n, &fft);
    transpose(data, n);
    rows(data, n, &fft);
    transpose(data, n);
}

/// Forward transform of real samples with `1/n²` normalization, so that
/// a single mode `cos(k·x)` has coefficients `1/2` at `±k`.
pub(crate) fn forward_real(values: &[f64], n: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, n, false);
    let norm = 1.0 / (n * n) as f64;
    buf.iter_mut().for_each(|c| *c *= norm);
    buf
}

/// Inverse transform keeping the real part.
pub(crate) fn inverse_real(coeffs: &[Complex64], n: usize) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    fft2(&mut buf, n, true);
    buf.into_iter().map(|c| c.re).collect()
}
