//! Benchmarks for the `fano-core` kernels live under `benches/`.
