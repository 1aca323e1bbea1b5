//! Benchmark-only crate; see `benches/pipeline.rs`.
//!
//! Run with `cargo bench -p heegaard-bench`.
