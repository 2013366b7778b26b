//! Property tests of the structural invariants, driven by random seeds.

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use machlab_core::compressible::{acoustic_propagator, gamma_upsilon, step_with, CompressibleState, StepOptions};
use machlab_core::funcspaces::{bmo_f_norm, bmo_norm, BallSampler, ClassF, WeightKind};
use machlab_core::harness::{fit_power_law, SweepConfig};
use machlab_core::incompressible::{vorticity_step, VorticityState};
use machlab_core::initial_data::{ill_prepared_family, mollify, DataRecipe};
use machlab_core::io::{read_fields, write_fields};
use machlab_core::littlewood_paley::DyadicPartition;
use machlab_core::spectral::{curl2d, divergence, leray_decompose, leray_p, random};
use machlab_core::{Grid, SpectralField};

fn grid() -> Grid {
    Grid::new(64, 2.0 * PI).unwrap()
}

fn field(seed: u64, k: f64) -> SpectralField {
    random::smooth(grid(), &mut random::rng(seed), k)
}

fn max_coeff(f: &SpectralField) -> f64 {
    f.spectral().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 16, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn parseval(seed in any::<u64>()) {
        let f = field(seed, 25.0);
        let (a, b) = (f.l2_norm(), f.l2_norm_spectral());
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn leray_is_a_direct_sum(seed in any::<u64>()) {
        let v = random::smooth_vector(grid(), &mut random::rng(seed), 25.0);
        let (p, q) = leray_decompose(&v);
        let scale = max_coeff(&v.v1).max(max_coeff(&v.v2));
        prop_assert!(p.add(&q).unwrap().max_coeff_diff(&v).unwrap() <= 1e-14 * scale);
        prop_assert!(max_coeff(&divergence(&p)) <= 1e-12 * scale);
        prop_assert!(max_coeff(&curl2d(&q)) <= 1e-12 * scale);
        // idempotent
        prop_assert!(leray_p(&p).max_coeff_diff(&p).unwrap() <= 1e-14 * scale);
    }

    #[test]
    fn littlewood_paley_reconstruction_and_orthogonality(seed in any::<u64>(), j in -1i32..5, gap in 2i32..4) {
        let g = grid();
        let part = DyadicPartition::new(g).unwrap();
        let f = field(seed, 30.0);
        let r = part.reconstruct(&f).unwrap();
        prop_assert!(r.sub(&f).unwrap().l2_norm() <= 1e-10 * f.l2_norm());
        let q = j + gap;
        if q <= part.q_max() {
            let dd = part.block(&part.block(&f, q, false).unwrap(), j, false).unwrap();
            prop_assert_eq!(max_coeff(&dd), 0.0);
        }
    }

    #[test]
    fn bmo_quotient_and_homogeneity(seed in any::<u64>(), c in -5.0f64..5.0, lambda in -3.0f64..3.0) {
        let g = Grid::new(64, 4.0).unwrap();
        let s = BallSampler::new(g).unwrap();
        let w = ClassF::one_plus_log();
        let f = random::smooth(g, &mut random::rng(seed), 15.0);
        let b = bmo_norm(&f, &s).unwrap();
        let bf = bmo_f_norm(&f, &w, &s).unwrap();
        let shifted = f.map_physical(|x| x + c);
        prop_assert!((bmo_norm(&shifted, &s).unwrap() - b).abs() <= 1e-12 * b.max(1.0));
        prop_assert!((bmo_f_norm(&shifted, &w, &s).unwrap() - bf).abs() <= 1e-12 * bf.max(1.0));
        let scaled = bmo_norm(&f.scale(lambda), &s).unwrap();
        prop_assert!((scaled - lambda.abs() * b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn bmo_weights_and_samplers_are_monotone(seed in any::<u64>(), c in 1.0f64..4.0) {
        let g = Grid::new(64, 4.0).unwrap();
        let f = random::smooth(g, &mut random::rng(seed), 15.0);
        let coarse = BallSampler::with_params(g, 4, 0.25, 0.5).unwrap();
        let rich = BallSampler::with_params(g, 2, 0.125, 1.0).unwrap();
        prop_assert!(bmo_norm(&f, &rich).unwrap() >= bmo_norm(&f, &coarse).unwrap());
        // F ≤ G pointwise: same oscillation data, larger denominators
        let light = ClassF::one_plus_log();
        let heavy = ClassF::verified(WeightKind::Custom("scaled".into(), Arc::new(move |u| c * (1.0 + u))));
        let (bl, bh) = (bmo_f_norm(&f, &light, &rich).unwrap(), bmo_f_norm(&f, &heavy, &rich).unwrap());
        prop_assert!(bl >= bh && bh >= bmo_norm(&f, &rich).unwrap());
    }

    #[test]
    fn mollification_does_not_inflate_bmo_f(seed in any::<u64>(), k in 1u32..8) {
        let g = Grid::new(64, 4.0).unwrap();
        let s = BallSampler::new(g).unwrap();
        let w = ClassF::one_plus_log();
        let f = random::smooth(g, &mut random::rng(seed), 15.0);
        prop_assert!(bmo_f_norm(&mollify(&f, k), &w, &s).unwrap() <= 1.1 * bmo_f_norm(&f, &w, &s).unwrap());
    }

    #[test]
    fn acoustic_propagator_is_unitary(seed in any::<u64>(), dt in -2.0f64..2.0, eps in 0.01f64..0.5) {
        let mut r = random::rng(seed);
        let v = random::smooth_vector(grid(), &mut r, 20.0);
        let c = random::smooth(grid(), &mut r, 20.0);
        let s = CompressibleState::new(v, c, eps, 0.4).unwrap();
        let n0 = gamma_upsilon(&s).l2_coeff_norm();
        let n1 = gamma_upsilon(&acoustic_propagator(&s, dt)).l2_coeff_norm();
        prop_assert!((n1 - n0).abs() <= 1e-12 * n0);
    }

    #[test]
    fn linear_steps_decouple_and_reverse(seed in any::<u64>(), dt in 0.01f64..0.3) {
        let mut r = random::rng(seed);
        let v = random::smooth_vector(grid(), &mut r, 20.0);
        let c = random::smooth(grid(), &mut r, 20.0);
        let s0 = CompressibleState::new(v, c, 0.05, 0.4).unwrap();
        let opts = StepOptions { nonlinear: false, ..Default::default() };
        let s1 = step_with(&s0, dt, opts).unwrap();
        let w0 = curl2d(&s0.v);
        prop_assert!(curl2d(&s1.v).max_abs_diff(&w0).unwrap() <= 1e-10 * w0.linf_norm());
        let back = step_with(&s1, -dt, opts).unwrap();
        let scale = s0.v.linf_norm().max(s0.c.linf_norm());
        prop_assert!(back.v.max_abs_diff(&s0.v).unwrap() <= 1e-10 * scale);
        prop_assert!(back.c.max_abs_diff(&s0.c).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn reference_velocity_stays_solenoidal(seed in any::<u64>()) {
        let w = field(seed, 10.0).mean_zero();
        let mut st = VorticityState::new(w).unwrap();
        for _ in 0..3 {
            st = vorticity_step(&st, 0.01).unwrap();
        }
        let v = st.velocity().unwrap();
        prop_assert!(divergence(&v).l2_norm() <= 1e-10 * v.v1.l2_norm().max(1e-300));
    }

    #[test]
    fn generated_data_have_solenoidal_mean_zero_parts(seed in any::<u64>(), eps in 0.01f64..0.5) {
        let g = Grid::with_default_box(64).unwrap();
        let recipe = DataRecipe { seed, epsilon: eps, ..Default::default() };
        let d = ill_prepared_family(g, &recipe).unwrap();
        prop_assert!(divergence(&leray_p(&d.v0)).l2_norm() <= 1e-10);
        prop_assert!(d.v0.v1.mean().abs() <= 1e-12 && d.v0.v2.mean().abs() <= 1e-12);
    }

    #[test]
    fn power_fit_recovers_exponents(a in -2.0f64..2.0, c in 0.1f64..10.0, m in 4usize..9) {
        let x: Vec<f64> = (0..m).map(|k| 0.5f64.powi(k as i32)).collect();
        let y: Vec<f64> = x.iter().map(|v| c * v.powf(a)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        prop_assert!((f.slope - a).abs() <= 1e-9);
        prop_assert!(f.residual <= 1e-9);
        prop_assert_eq!(f.points, m);
    }

    #[test]
    fn field_files_round_trip(seed in any::<u64>()) {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("f.field");
        let (a, b) = (field(seed, 20.0), field(seed ^ 1, 5.0));
        write_fields(&p, &[("a", &a), ("b", &b)]).unwrap();
        let back = read_fields(&p).unwrap();
        prop_assert_eq!(back.len(), 2);
        prop_assert_eq!(back[0].field.physical(), a.physical());
        prop_assert_eq!(back[1].field.physical(), b.physical());
        prop_assert_eq!(back[1].name.as_str(), "b");
    }

    #[test]
    fn resolved_config_round_trips(seed in any::<u64>(), n_pow in 3u32..8, t in 0.1f64..2.0) {
        let cfg = SweepConfig { seed, n: 1 << n_pow, t_final: t, sample_dt: t / 4.0, ..Default::default() };
        let again = SweepConfig::parse(&cfg.to_resolved_string()).unwrap();
        prop_assert_eq!(again.to_resolved_string(), cfg.to_resolved_string());
        prop_assert_eq!((again.seed, again.n, again.t_final), (seed, 1 << n_pow, t));
    }
}
