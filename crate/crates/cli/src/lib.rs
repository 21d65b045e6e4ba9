//! IO companion for the sketch library: serialized sketch files (binary
//! with a JSON mirror), vector and CSV ingestion, the synthetic benchmark
//! harness, and the `ipsketch` command-line tool built on them.

pub mod bench;
pub mod formats;
pub mod ingest;
