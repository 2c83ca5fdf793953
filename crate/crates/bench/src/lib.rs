//! Criterion benchmarks for `arakelov-core` live in `benches/`.
