//! Criterion benchmarks for the circuit-code kernels; see `benches/`.
