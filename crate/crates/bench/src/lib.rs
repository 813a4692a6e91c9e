//! Criterion benchmarks for the algebra layer live in `benches/`.
