//! Criterion benchmarks for the adpass core; see `benches/`.
