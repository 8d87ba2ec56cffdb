//! Benchmarks for `fanstate-core` live under `benches/`.
