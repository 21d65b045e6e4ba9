//! Table-column encodings and join statistics from sketches alone.
//!
//! A keyed column becomes two vectors over the key domain: a binary
//! indicator of which keys are present, and a value vector carrying the
//! column's value at each key index. Inner products between such vectors
//! are exactly the join statistics of the two tables (join size, post-join
//! SUM), so any pair of compatible sketches estimates them without
//! materializing the join.

use alloc::vec::Vec;

use crate::baselines::{CountSketch, JlSketch, KmvSketch};
use crate::error::{Error, Result};
use crate::minhash::MinHashSketch;
use crate::sparse::SparseVector;
use crate::weighted_minhash::{Strategy, WeightedMinHashSketch, DEFAULT_DISCRETIZATION};
use crate::Method;

/// One table's join-key column with an optional aligned value column.
/// Keys are integers in `[1, dimension]`, one row per key.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyedColumn {
    dimension: u64,
    keys: Vec<u64>,
    values: Option<Vec<f64>>,
}

impl KeyedColumn {
    /// Builds a column; duplicate keys, out-of-range keys, and misaligned
    /// value lists are rejected.
    pub fn new(dimension: u64, keys: Vec<u64>, values: Option<Vec<f64>>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("domain size must be at least 1"));
        }
        if let Some(values) = &values {
            if values.len() != keys.len() {
                return Err(Error::InvalidParameter(
                    "value list must align one-to-one with keys",
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("values must be finite"));
            }
        }
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateIndex(pair[0]));
            }
        }
        for &key in &keys {
            if key == 0 || key > dimension {
                return Err(Error::IndexOutOfRange {
                    index: key,
                    dimension,
                });
            }
        }
        Ok(KeyedColumn {
            dimension,
            keys,
            values,
        })
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    /// Binary vector with a one at every key index.
    pub fn key_indicator(&self) -> SparseVector {
        SparseVector::new(self.dimension, self.keys.iter().map(|&k| (k, 1.0)).collect())
            .expect("validated keys encode cleanly")
    }

    /// Vector carrying the column value at each key index. Zero values
    /// vanish from the sparse form, which removes those keys from this
    /// vector's support but adds nothing to any SUM.
    pub fn value_vector(&self) -> Result<SparseVector> {
        let values = self.values.as_ref().ok_or(Error::MissingValues)?;
        SparseVector::new(
            self.dimension,
            self.keys.iter().copied().zip(values.iter().copied()).collect(),
        )
    }
}

/// Join statistics estimated (or computed exactly) from column encodings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JoinStats {
    /// Estimated number of joined rows.
    pub join_size: f64,
    /// Estimated SUM of the first table's values over joined rows.
    pub sum: f64,
    /// `sum / join_size`; undefined when the join-size estimate is not
    /// positive.
    pub mean: Option<f64>,
}

/// A sketch of any method behind one estimation interface.
///
/// `Empty` marks sketches of vectors with no nonzero entries, for which
/// the sampling sketches have no minimum to store; estimates against it
/// are exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySketch {
    Empty { dimension: u64 },
    MinHash(MinHashSketch),
    WeightedMinHash(WeightedMinHashSketch),
    Kmv(KmvSketch),
    Jl(JlSketch),
    CountSketch(CountSketch),
}

impl AnySketch {
    pub fn method(&self) -> Method {
        match self {
            AnySketch::Empty { .. } => Method::Empty,
            AnySketch::MinHash(_) => Method::MinHash,
            AnySketch::WeightedMinHash(_) => Method::WeightedMinHash,
            AnySketch::Kmv(_) => Method::Kmv,
            AnySketch::Jl(_) => Method::Jl,
            AnySketch::CountSketch(_) => Method::CountSketch,
        }
    }

    pub fn dimension(&self) -> u64 {
        match self {
            AnySketch::Empty { dimension } => *dimension,
            AnySketch::MinHash(s) => s.dimension(),
            AnySketch::WeightedMinHash(s) => s.dimension(),
            AnySketch::Kmv(s) => s.dimension(),
            AnySketch::Jl(s) => s.dimension(),
            AnySketch::CountSketch(s) => s.dimension(),
        }
    }

    /// Estimates the inner product of the sketched vectors. Both sketches
    /// must use the same method (or be empty markers).
    pub fn estimate(&self, other: &AnySketch) -> Result<f64> {
        match (self, other) {
            (AnySketch::Empty { dimension }, _) => {
                check_dims(*dimension, other.dimension())?;
                Ok(0.0)
            }
            (_, AnySketch::Empty { dimension }) => {
                check_dims(self.dimension(), *dimension)?;
                Ok(0.0)
            }
            (AnySketch::MinHash(a), AnySketch::MinHash(b)) => a.estimate(b),
            (AnySketch::WeightedMinHash(a), AnySketch::WeightedMinHash(b)) => a.estimate(b),
            (AnySketch::Kmv(a), AnySketch::Kmv(b)) => a.estimate(b),
            (AnySketch::Jl(a), AnySketch::Jl(b)) => a.estimate(b),
            (AnySketch::CountSketch(a), AnySketch::CountSketch(b)) => a.estimate(b),
            _ => Err(Error::SketchMismatch("method")),
        }
    }
}

fn check_dims(left: u64, right: u64) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Parameters for sketching an encoded column vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SketchSpec {
    pub method: Method,
    /// Samples, rows, buckets, or KMV budget, depending on the method.
    pub samples: usize,
    pub seed: u64,
    /// Weighted MinHash discretization; ignored elsewhere.
    pub discretization: u64,
    /// Weighted MinHash slot-minimum strategy; ignored elsewhere.
    pub strategy: Strategy,
    /// CountSketch repetition count; ignored elsewhere.
    pub reps: usize,
}

impl SketchSpec {
    pub fn new(method: Method, samples: usize, seed: u64) -> Self {
        SketchSpec {
            method,
            samples,
            seed,
            discretization: DEFAULT_DISCRETIZATION,
            strategy: Strategy::Fast,
            reps: crate::baselines::DEFAULT_CS_REPS,
        }
    }
}

/// Sketches a column encoding. Vectors with no nonzero entries map to the
/// explicit empty marker instead of reaching a sampling sketch that has no
/// minimum to take.
pub fn sketch_vector(vector: &SparseVector, spec: &SketchSpec) -> Result<AnySketch> {
    if vector.is_empty() && spec.method != Method::Jl && spec.method != Method::CountSketch {
        return Ok(AnySketch::Empty {
            dimension: vector.dimension(),
        });
    }
    Ok(match spec.method {
        Method::Empty => AnySketch::Empty {
            dimension: vector.dimension(),
        },
        Method::MinHash => {
            AnySketch::MinHash(MinHashSketch::build(vector, spec.samples, spec.seed)?)
        }
        Method::WeightedMinHash => AnySketch::WeightedMinHash(WeightedMinHashSketch::build(
            vector,
            spec.samples,
            spec.discretization,
            spec.strategy,
            spec.seed,
        )?),
        Method::Kmv => AnySketch::Kmv(KmvSketch::build(vector, spec.samples, spec.seed)?),
        Method::Jl => AnySketch::Jl(JlSketch::build(vector, spec.samples, spec.seed)?),
        Method::CountSketch => AnySketch::CountSketch(CountSketch::build(
            vector,
            spec.samples,
            spec.reps,
            spec.seed,
        )?),
    })
}

/// Estimates join statistics between tables A and B from three sketches:
/// A's value vector, A's key indicator, and B's key indicator.
///
/// `join_size` estimates the key intersection, `sum` the post-join SUM of
/// A's values; `mean` is their ratio, undefined when the join-size
/// estimate is not positive.
pub fn estimate_join_stats(
    value_a: &AnySketch,
    key_a: &AnySketch,
    key_b: &AnySketch,
) -> Result<JoinStats> {
    let methods = [value_a.method(), key_a.method(), key_b.method()];
    let mut concrete = methods.iter().filter(|&&m| m != Method::Empty);
    if let Some(&first) = concrete.next() {
        if concrete.any(|&m| m != first) {
            return Err(Error::SketchMismatch("method"));
        }
    }
    let join_size = key_a.estimate(key_b)?;
    let sum = value_a.estimate(key_b)?;
    let mean = if join_size > 0.0 {
        Some(sum / join_size)
    } else {
        None
    };
    Ok(JoinStats {
        join_size,
        sum,
        mean,
    })
}

/// The same statistics computed exactly from the unsketched columns.
/// Table A must carry values.
pub fn exact_join_stats(a: &KeyedColumn, b: &KeyedColumn) -> Result<JoinStats> {
    let value_a = a.value_vector()?;
    let key_a = a.key_indicator();
    let key_b = b.key_indicator();
    let join_size = key_a.inner(&key_b)?;
    let sum = value_a.inner(&key_b)?;
    let mean = if join_size > 0.0 {
        Some(sum / join_size)
    } else {
        None
    };
    Ok(JoinStats {
        join_size,
        sum,
        mean,
    })
}

/// Exact Jaccard similarity of two key sets: shared keys over distinct
/// keys. Zero when both are empty.
pub fn key_jaccard(a: &KeyedColumn, b: &KeyedColumn) -> Result<f64> {
    let ka = a.key_indicator();
    let kb = b.key_indicator();
    let shared = ka.inner(&kb)?;
    let union = ka.nnz() as f64 + kb.nnz() as f64 - shared;
    if union == 0.0 {
        return Ok(0.0);
    }
    Ok(shared / union)
}

/// Maps an arbitrary string key into `[1, dimension]` with FNV-1a.
/// Collisions are the caller's risk; pick the domain large enough.
pub fn hash_string_key(key: &str, dimension: u64) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = FNV_OFFSET;
    for byte in key.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    1 + hash % dimension
}
