//! Unweighted MinHash sketches.
//!
//! Each repetition hashes every support index and keeps the minimum hash
//! together with the vector value at the argmin, so two sketches built from
//! the same seed yield coordinated uniform samples of the support union.
//! The same hash minima drive a Flajolet-Martin style union-size estimator,
//! which normalizes the collision sum into an inner product estimate.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hashing::{scramble_index, PairwiseHash, RepSeed};
use crate::math;
use crate::sparse::SparseVector;

/// MinHash sketch: per repetition, the minimum hash over the support and
/// the vector value at the minimizing index.
#[derive(Clone, Debug, PartialEq)]
pub struct MinHashSketch {
    samples: usize,
    hash_mins: Vec<f64>,
    sampled_values: Vec<f64>,
    seed: u64,
    dimension: u64,
}

impl MinHashSketch {
    /// Sketches `vector` with `samples` independent repetitions derived
    /// from `seed`. The vector must have at least one nonzero entry.
    pub fn build(vector: &SparseVector, samples: usize, seed: u64) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::EmptyVector);
        }
        if samples == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1"));
        }
        let mut hash_mins = Vec::with_capacity(samples);
        let mut sampled_values = Vec::with_capacity(samples);
        for rep in 1..=samples {
            let hash = PairwiseHash::from_seed(RepSeed::new(seed, rep as u32));
            let mut best_hash = f64::INFINITY;
            let mut best_value = 0.0;
            for &(index, value) in vector.entries() {
                let h = hash.evaluate(scramble_index(index));
                if h < best_hash {
                    best_hash = h;
                    best_value = value;
                }
            }
            hash_mins.push(best_hash);
            sampled_values.push(best_value);
        }
        Ok(MinHashSketch {
            samples,
            hash_mins,
            sampled_values,
            seed,
            dimension: vector.dimension(),
        })
    }

    /// Reassembles a sketch from its stored arrays, validating lengths and
    /// the `(0, 1]` hash range. Used by deserialization.
    pub fn from_parts(
        hash_mins: Vec<f64>,
        sampled_values: Vec<f64>,
        seed: u64,
        dimension: u64,
    ) -> Result<Self> {
        if hash_mins.is_empty() || hash_mins.len() != sampled_values.len() {
            return Err(Error::InvalidParameter(
                "hash and value arrays must be nonempty and equal length",
            ));
        }
        if hash_mins.iter().any(|&h| !(h > 0.0 && h <= 1.0)) {
            return Err(Error::InvalidParameter("hash values must lie in (0, 1]"));
        }
        Ok(MinHashSketch {
            samples: hash_mins.len(),
            hash_mins,
            sampled_values,
            seed,
            dimension,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn hash_mins(&self) -> &[f64] {
        &self.hash_mins
    }

    pub fn sampled_values(&self) -> &[f64] {
        &self.sampled_values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    fn check_compatible(&self, other: &MinHashSketch) -> Result<()> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        if self.samples != other.samples {
            return Err(Error::SketchMismatch("sample count"));
        }
        if self.seed != other.seed {
            return Err(Error::SketchMismatch("seed"));
        }
        Ok(())
    }

    /// Estimates the support union size from the pairwise hash minima:
    /// `m / sum_i min(h_a[i], h_b[i]) - 1`.
    pub fn union_estimate(&self, other: &MinHashSketch) -> Result<f64> {
        self.check_compatible(other)?;
        let sum: f64 = self
            .hash_mins
            .iter()
            .zip(&other.hash_mins)
            .map(|(&a, &b)| a.min(b))
            .sum();
        Ok(self.samples as f64 / sum - 1.0)
    }

    /// Inner product estimate. Collisions are detected by bit-exact hash
    /// equality; the collision sum is scaled by the union estimate.
    pub fn estimate(&self, other: &MinHashSketch) -> Result<f64> {
        let union = self.union_estimate(other)?;
        let mut sum = 0.0;
        for i in 0..self.samples {
            if self.hash_mins[i] == other.hash_mins[i] {
                sum += self.sampled_values[i] * other.sampled_values[i];
            }
        }
        Ok(union / self.samples as f64 * sum)
    }
}

/// Median of the per-pair estimates over independently seeded sketch pairs.
///
/// Requires an odd number of pairs so the median is an order statistic;
/// every pair must be internally compatible and all pairs must share the
/// sample count and dimension.
pub fn median_estimate(pairs: &[(MinHashSketch, MinHashSketch)]) -> Result<f64> {
    if pairs.is_empty() || pairs.len() % 2 == 0 {
        return Err(Error::InvalidParameter("pair count must be odd"));
    }
    let (first, _) = &pairs[0];
    let mut estimates = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        if a.samples != first.samples || a.dimension != first.dimension {
            return Err(Error::SketchMismatch("sample count or dimension across pairs"));
        }
        estimates.push(a.estimate(b)?);
    }
    Ok(math::median_in_place(&mut estimates))
}
