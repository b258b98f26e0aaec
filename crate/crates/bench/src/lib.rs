//! Benchmarks for the hot paths of the optimizer live under `benches/`.
