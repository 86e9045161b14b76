//! Criterion benchmarks for the cohstat kernels live under `benches/`.
