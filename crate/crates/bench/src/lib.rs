//! Criterion benchmarks for the optimizer primitives; see `benches/`.
