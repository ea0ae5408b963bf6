//! Criterion benchmarks for the `tsum` crate; see `benches/`.
