//! Criterion benchmarks for the FDSS chain live under `benches/`.
