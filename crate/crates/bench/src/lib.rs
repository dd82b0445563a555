//! Criterion benchmarks for the measurement kernels; see `benches/main.rs`.
