//! Criterion benchmarks for the codec; see `benches/`.
