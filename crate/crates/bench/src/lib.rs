//! Criterion benchmarks for `threshold-lab`; see `benches/`.
