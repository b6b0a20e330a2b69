//! Benchmarks for `dot11ee`; see `benches/`.
