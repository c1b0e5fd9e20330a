//! Criterion benchmarks for the gsd-core kernels; see `benches/kernels.rs`.
