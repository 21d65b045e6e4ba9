//! Sketches for inner product estimation between high-dimensional sparse
//! vectors.
//!
//! The centerpiece is a weighted MinHash sketch that samples vector entries
//! with probability proportional to their squared magnitude, paired with an
//! estimator whose error scales with the overlapping (not total) mass of the
//! two vectors. Unweighted MinHash, KMV, Johnson-Lindenstrauss projection,
//! and CountSketch are provided as baselines behind the same sketch/estimate
//! contract, and the [`tables`] module turns table columns into vectors so
//! join size, post-join SUM, and post-join MEAN can be estimated from
//! sketches alone.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for embedded use.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod error;
pub mod hashing;
mod math;
pub mod minhash;
pub mod sparse;
pub mod tables;
pub mod weighted_minhash;

pub use error::{Error, Result};
pub use sparse::SparseVector;

/// Identifies a sketching method, as recorded in serialized sketch headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Marker for sketches of empty vectors; estimates against it are zero.
    Empty,
    MinHash,
    WeightedMinHash,
    Kmv,
    Jl,
    CountSketch,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Empty => "EMPTY",
            Method::MinHash => "MH",
            Method::WeightedMinHash => "WMH",
            Method::Kmv => "KMV",
            Method::Jl => "JL",
            Method::CountSketch => "CS",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        match tag {
            "EMPTY" => Some(Method::Empty),
            "MH" => Some(Method::MinHash),
            "WMH" => Some(Method::WeightedMinHash),
            "KMV" => Some(Method::Kmv),
            "JL" => Some(Method::Jl),
            "CS" => Some(Method::CountSketch),
            _ => None,
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag())
    }
}
