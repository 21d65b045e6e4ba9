//! Weighted MinHash sketches.
//!
//! A vector is normalized, rounded so every squared entry is an integer
//! multiple of `1/L`, and conceptually expanded into `n` blocks of length
//! `L` whose first `k_i` slots repeat entry `i` (`k_i = L * z[i]^2`).
//! Ordinary MinHash over the expanded vector then samples index `i` with
//! probability proportional to `z[i]^2`, so entries of wildly different
//! magnitude are all represented. Collisions between two such sketches
//! occur with probability equal to the weighted Jaccard similarity of the
//! rounded vectors, and inverse-probability weighting turns the collision
//! sum into an inner product estimate scaled back by the stored norms.
//!
//! Two sketching strategies are offered. `Exact` hashes every nonzero slot
//! of the expanded vector with the 2-wise linear hash. `Fast` walks the
//! per-block prefix-minimum records instead, costing expected `O(log L)`
//! per block per repetition. They realize the same distribution but not the
//! same bits, so estimation partners must use the same strategy.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hashing::{scramble_index, PairwiseHash, PrefixMinRecords, RepSeed};
use crate::math;
use crate::sparse::SparseVector;

/// Default discretization parameter for desk-scale sketching.
pub const DEFAULT_DISCRETIZATION: u64 = 10_000_000;

/// How the minimum hash over each expanded block is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Evaluate the 2-wise hash at every nonzero slot of the expanded
    /// vector. Reference behavior; cost grows linearly with `L`.
    Exact,
    /// Walk per-block prefix-minimum records with geometric skips;
    /// expected `O(log L)` work per block per repetition.
    Fast,
}

impl Strategy {
    pub fn tag(&self) -> &'static str {
        match self {
            Strategy::Exact => "exact",
            Strategy::Fast => "fast",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Strategy> {
        match tag {
            "exact" => Some(Strategy::Exact),
            "fast" => Some(Strategy::Fast),
            _ => None,
        }
    }
}

/// Unit vector rounded so every squared entry is an integer multiple of
/// `1/L`, stored exactly as integer counts: `z[index]^2 = count / L`.
///
/// Counts always sum to exactly `L`. Entries rounded to zero are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundedUnitVector {
    dimension: u64,
    discretization: u64,
    // (index, count, negative); count >= 1, indices strictly increasing.
    entries: Vec<(u64, u64, bool)>,
}

impl RoundedUnitVector {
    /// Rounds a unit vector: each squared entry floors to a multiple of
    /// `1/L`, and the lost mass is added back onto the largest-magnitude
    /// entry (ties broken by lowest index) so the result stays unit.
    ///
    /// The input must be nonzero with `|norm - 1| <= 1e-9`. Squared
    /// weights within `1e-9` (relative) of an exact multiple snap to it
    /// before flooring, so re-rounding a vector reconstructed from counts
    /// reproduces the counts bit for bit.
    pub fn round(unit: &SparseVector, discretization: u64) -> Result<Self> {
        if unit.is_empty() {
            return Err(Error::EmptyVector);
        }
        if discretization == 0 {
            return Err(Error::InvalidParameter("discretization must be at least 1"));
        }
        if math::abs(unit.norm() - 1.0) > 1e-9 {
            return Err(Error::NotUnitNorm);
        }
        let scale = discretization as f64;
        let mut entries: Vec<(u64, u64, bool)> = Vec::with_capacity(unit.nnz());
        let mut total: u128 = 0;
        let mut max_abs = f64::NEG_INFINITY;
        let mut max_slot = 0usize;
        for (slot, &(index, value)) in unit.entries().iter().enumerate() {
            let count = snap_floor(value * value * scale);
            total += count as u128;
            entries.push((index, count, value < 0.0));
            let abs = math::abs(value);
            if abs > max_abs {
                max_abs = abs;
                max_slot = slot;
            }
        }
        let deficit = discretization as i128 - total as i128;
        let adjusted = entries[max_slot].1 as i128 + deficit;
        if adjusted < 1 {
            return Err(Error::InvalidParameter(
                "rounding deficit exceeds the largest entry",
            ));
        }
        entries[max_slot].1 = adjusted as u64;
        entries.retain(|&(_, count, _)| count > 0);
        debug_assert_eq!(
            entries.iter().map(|&(_, c, _)| c as u128).sum::<u128>(),
            discretization as u128
        );
        Ok(RoundedUnitVector {
            dimension: unit.dimension(),
            discretization,
            entries,
        })
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn discretization(&self) -> u64 {
        self.discretization
    }

    /// `(index, count, negative)` triples with strictly increasing indices.
    pub fn entries(&self) -> &[(u64, u64, bool)] {
        &self.entries
    }

    /// Number of nonzero slots in the expanded block for `index`
    /// (zero if the index is not in the rounded support).
    pub fn block_length(&self, index: u64) -> u64 {
        match self.entries.binary_search_by_key(&index, |&(i, _, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0,
        }
    }

    /// Rounded value at `index`: `sign * sqrt(count / L)`, zero if absent.
    pub fn value_at(&self, index: u64) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _, _)| i) {
            Ok(pos) => {
                let (_, count, negative) = self.entries[pos];
                signed_value(count, self.discretization, negative)
            }
            Err(_) => 0.0,
        }
    }

    /// The rounded unit vector in sparse form.
    pub fn to_sparse(&self) -> SparseVector {
        let entries = self
            .entries
            .iter()
            .map(|&(index, count, negative)| {
                (index, signed_value(count, self.discretization, negative))
            })
            .collect();
        SparseVector::new(self.dimension, entries).expect("rounded entries are valid")
    }

    /// Weighted Jaccard similarity `sum min(k) / sum max(k)` in exact
    /// integer arithmetic.
    pub fn weighted_jaccard(&self, other: &RoundedUnitVector) -> Result<f64> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        if self.discretization != other.discretization {
            return Err(Error::SketchMismatch("discretization"));
        }
        let (mut i, mut j) = (0, 0);
        let mut min_sum: u128 = 0;
        let mut max_sum: u128 = 0;
        while i < self.entries.len() && j < other.entries.len() {
            let (ai, ac, _) = self.entries[i];
            let (bi, bc, _) = other.entries[j];
            if ai == bi {
                min_sum += ac.min(bc) as u128;
                max_sum += ac.max(bc) as u128;
                i += 1;
                j += 1;
            } else if ai < bi {
                max_sum += ac as u128;
                i += 1;
            } else {
                max_sum += bc as u128;
                j += 1;
            }
        }
        for &(_, c, _) in &self.entries[i..] {
            max_sum += c as u128;
        }
        for &(_, c, _) in &other.entries[j..] {
            max_sum += c as u128;
        }
        Ok(min_sum as f64 / max_sum as f64)
    }
}

#[inline]
fn signed_value(count: u64, discretization: u64, negative: bool) -> f64 {
    let magnitude = math::sqrt(count as f64 / discretization as f64);
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// Floor that first snaps values within `1e-9` (relative) of an integer to
/// that integer, absorbing float error in squared weights that are exact
/// multiples of `1/L` in real arithmetic.
#[inline]
fn snap_floor(t: f64) -> u64 {
    debug_assert!(t >= 0.0);
    let nearest = math::round(t);
    if math::abs(t - nearest) <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        math::floor(t) as u64
    }
}

/// Weighted MinHash sketch: per repetition, the minimum hash over the
/// expanded vector's nonzero slots and the rounded entry it belongs to,
/// plus the Euclidean norm of the original vector.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMinHashSketch {
    samples: usize,
    hash_mins: Vec<f64>,
    sampled_values: Vec<f64>,
    stored_norm: f64,
    discretization: u64,
    seed: u64,
    dimension: u64,
    strategy: Strategy,
}

impl WeightedMinHashSketch {
    /// Sketches `vector` with `samples` repetitions at discretization
    /// `discretization`, using the given slot-minimum `strategy`.
    pub fn build(
        vector: &SparseVector,
        samples: usize,
        discretization: u64,
        strategy: Strategy,
        seed: u64,
    ) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::EmptyVector);
        }
        if samples == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1"));
        }
        if discretization == 0 {
            return Err(Error::InvalidParameter("discretization must be at least 1"));
        }
        if vector.dimension().checked_mul(discretization).is_none() {
            return Err(Error::InvalidParameter(
                "dimension * discretization overflows the expanded index space",
            ));
        }
        match vector.dimension().checked_mul(100) {
            Some(bound) if discretization >= bound => {}
            _ => log::warn!(
                "discretization {} is below 100x dimension {}; small entries may round to zero",
                discretization,
                vector.dimension()
            ),
        }
        let norm = vector.norm();
        let unit = vector.scaled(1.0 / norm)?;
        let rounded = RoundedUnitVector::round(&unit, discretization)?;
        let values: Vec<f64> = rounded
            .entries()
            .iter()
            .map(|&(_, count, negative)| signed_value(count, discretization, negative))
            .collect();

        let mut hash_mins = Vec::with_capacity(samples);
        let mut sampled_values = Vec::with_capacity(samples);
        for rep in 1..=samples {
            let rep_seed = RepSeed::new(seed, rep as u32);
            let mut best_hash = f64::INFINITY;
            let mut best_value = 0.0;
            match strategy {
                Strategy::Exact => {
                    let hash = PairwiseHash::from_seed(rep_seed);
                    for (slot, &(index, count, _)) in rounded.entries().iter().enumerate() {
                        let base = (index - 1) * discretization;
                        for offset in 1..=count {
                            let h = hash.evaluate(scramble_index(base + offset));
                            if h < best_hash {
                                best_hash = h;
                                best_value = values[slot];
                            }
                        }
                    }
                }
                Strategy::Fast => {
                    for (slot, &(index, count, _)) in rounded.entries().iter().enumerate() {
                        let records = PrefixMinRecords::generate(rep_seed, index, count);
                        if let Some((h, _)) = records.min_at(count) {
                            if h < best_hash {
                                best_hash = h;
                                best_value = values[slot];
                            }
                        }
                    }
                }
            }
            hash_mins.push(best_hash);
            sampled_values.push(best_value);
        }
        Ok(WeightedMinHashSketch {
            samples,
            hash_mins,
            sampled_values,
            stored_norm: norm,
            discretization,
            seed,
            dimension: vector.dimension(),
            strategy,
        })
    }

    /// Reassembles a sketch from stored fields, validating array lengths,
    /// the hash range, the norm, and that every sampled value squares to a
    /// positive integer multiple of `1/L`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        hash_mins: Vec<f64>,
        sampled_values: Vec<f64>,
        stored_norm: f64,
        discretization: u64,
        seed: u64,
        dimension: u64,
        strategy: Strategy,
    ) -> Result<Self> {
        if hash_mins.is_empty() || hash_mins.len() != sampled_values.len() {
            return Err(Error::InvalidParameter(
                "hash and value arrays must be nonempty and equal length",
            ));
        }
        if hash_mins.iter().any(|&h| !(h > 0.0 && h <= 1.0)) {
            return Err(Error::InvalidParameter("hash values must lie in (0, 1]"));
        }
        if !(stored_norm > 0.0) || !stored_norm.is_finite() {
            return Err(Error::InvalidParameter("stored norm must be positive"));
        }
        if discretization == 0 {
            return Err(Error::InvalidParameter("discretization must be at least 1"));
        }
        for &v in &sampled_values {
            let scaled = v * v * discretization as f64;
            let nearest = math::round(scaled);
            if nearest < 1.0 || math::abs(scaled - nearest) > 1e-6 * nearest.max(1.0) {
                return Err(Error::InvalidParameter(
                    "sampled values must square to positive multiples of 1/L",
                ));
            }
        }
        Ok(WeightedMinHashSketch {
            samples: hash_mins.len(),
            hash_mins,
            sampled_values,
            stored_norm,
            discretization,
            seed,
            dimension,
            strategy,
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

    pub fn stored_norm(&self) -> f64 {
        self.stored_norm
    }

    pub fn discretization(&self) -> u64 {
        self.discretization
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    fn check_compatible(&self, other: &WeightedMinHashSketch) -> Result<()> {
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
        if self.discretization != other.discretization {
            return Err(Error::SketchMismatch("discretization"));
        }
        // Exact and fast realize different hash bits, so estimates across
        // strategies would be noise.
        if self.strategy != other.strategy {
            return Err(Error::SketchMismatch("strategy"));
        }
        Ok(())
    }

    /// Estimates the weighted union size `sum_j max(za[j]^2, zb[j]^2)`:
    /// `(m / sum_i min(ha[i], hb[i]) - 1) / L`.
    pub fn union_estimate(&self, other: &WeightedMinHashSketch) -> Result<f64> {
        self.check_compatible(other)?;
        let sum: f64 = self
            .hash_mins
            .iter()
            .zip(&other.hash_mins)
            .map(|(&a, &b)| a.min(b))
            .sum();
        Ok((self.samples as f64 / sum - 1.0) / self.discretization as f64)
    }

    /// Inner product estimate: inverse-probability-weighted collision sum,
    /// scaled by the weighted union estimate and both stored norms.
    pub fn estimate(&self, other: &WeightedMinHashSketch) -> Result<f64> {
        let union = self.union_estimate(other)?;
        let sum = self.collision_sum(other);
        let normalized = union / self.samples as f64 * sum;
        Ok(self.stored_norm * other.stored_norm * normalized)
    }

    /// Collision sum `sum_i 1[ha=hb] * va*vb / min(va^2, vb^2)` without the
    /// union scaling; building block of the estimator and its tests.
    pub fn collision_sum(&self, other: &WeightedMinHashSketch) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.samples {
            if self.hash_mins[i] == other.hash_mins[i] {
                let va = self.sampled_values[i];
                let vb = other.sampled_values[i];
                // Both values are nonzero rounded entries, so the
                // denominator is at least 1/L.
                sum += va * vb / (va * va).min(vb * vb);
            }
        }
        sum
    }
}

/// Median of per-pair estimates over independently seeded sketch pairs;
/// see [`crate::minhash::median_estimate`] for the contract.
pub fn median_estimate(pairs: &[(WeightedMinHashSketch, WeightedMinHashSketch)]) -> Result<f64> {
    if pairs.is_empty() || pairs.len() % 2 == 0 {
        return Err(Error::InvalidParameter("pair count must be odd"));
    }
    let (first, _) = &pairs[0];
    let mut estimates = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        if a.samples != first.samples
            || a.dimension != first.dimension
            || a.discretization != first.discretization
            || a.strategy != first.strategy
        {
            return Err(Error::SketchMismatch("parameters across pairs"));
        }
        estimates.push(a.estimate(b)?);
    }
    Ok(math::median_in_place(&mut estimates))
}
