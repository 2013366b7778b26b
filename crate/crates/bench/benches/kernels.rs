use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use machlab_core::compressible::{nonlinear_rhs, step, CompressibleState};
use machlab_core::funcspaces::{bmo_norm, BallSampler};
use machlab_core::initial_data::{ill_prepared_family, DataRecipe};
use machlab_core::spectral::random;
use machlab_core::{Grid, SpectralField};

fn state(n: usize) -> CompressibleState {
    let g = Grid::with_default_box(n).unwrap();
    let d = ill_prepared_family(g, &DataRecipe::default()).unwrap();
    CompressibleState::new(d.v0, d.c0, 0.05, 0.5).unwrap()
}

fn fft(c: &mut Criterion) {
    let mut grp = c.benchmark_group("fft");
    for n in [64, 128, 256] {
        let g = Grid::new(n, 8.0).unwrap();
        let f = random::smooth(g, &mut random::rng(1), 20.0);
        let phys = f.physical().to_vec();
        grp.bench_with_input(BenchmarkId::new("forward", n), &phys, |b, p| {
            b.iter(|| {
                let f = SpectralField::from_physical(g, p.clone()).unwrap();
                black_box(f.spectral().len())
            })
        });
    }
    grp.finish();
}

fn rhs_and_step(c: &mut Criterion) {
    let mut grp = c.benchmark_group("compressible");
    for n in [64, 128] {
        let s = state(n);
        grp.bench_with_input(BenchmarkId::new("nonlinear_rhs", n), &s, |b, s| b.iter(|| black_box(nonlinear_rhs(s))));
        grp.bench_with_input(BenchmarkId::new("step", n), &s, |b, s| b.iter(|| black_box(step(s, 0.01).unwrap())));
    }
    grp.finish();
}

fn bmo(c: &mut Criterion) {
    let mut grp = c.benchmark_group("bmo_norm");
    grp.sample_size(10);
    for n in [64, 128] {
        let g = Grid::new(n, 4.0).unwrap();
        let f = random::smooth(g, &mut random::rng(2), 20.0);
        let s = BallSampler::new(g).unwrap();
        grp.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| black_box(bmo_norm(f, &s).unwrap())));
    }
    grp.finish();
}

criterion_group!(kernels, fft, rhs_and_step, bmo);
criterion_main!(kernels);
