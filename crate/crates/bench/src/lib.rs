//! Criterion benchmarks for the gfcube kernels live in `benches/`.
