//! Criterion benchmarks for `hlnsim` live in `benches/`.
