//! Criterion benchmarks for sqrtlap-core; see `benches/galerkin.rs`.
