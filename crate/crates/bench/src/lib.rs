//! Criterion benchmarks of the machlab kernels; see `benches/kernels.rs`.
