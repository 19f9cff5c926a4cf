//! Criterion benchmarks for the spectral and finite-difference solvers; see `benches/`.
