//! Baseline sketches the weighted sampler is benchmarked against: JL/AMS
//! dense projection, CountSketch with a median over repetitions, and KMV
//! bottom-k sampling without replacement.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hashing::{
    derive_key, scramble_index, stream_at, PairwiseHash, RepSeed, DOMAIN_CS_BUCKET,
    DOMAIN_CS_SIGN, DOMAIN_JL_SIGNS, DOMAIN_KMV,
};
use crate::math;
use crate::sparse::SparseVector;

/// Default CountSketch repetition count.
pub const DEFAULT_CS_REPS: usize = 5;

/// Johnson-Lindenstrauss projection `S(a) = Pi * a` with `+-1/sqrt(m)`
/// entries. Rows of `Pi` are generated lazily from `(seed, row, index)`,
/// so the full matrix never materializes even for huge dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct JlSketch {
    rows: usize,
    projected: Vec<f64>,
    seed: u64,
    dimension: u64,
}

impl JlSketch {
    pub fn build(vector: &SparseVector, rows: usize, seed: u64) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidParameter("row count must be at least 1"));
        }
        let scale = 1.0 / math::sqrt(rows as f64);
        let mut projected = vec![0.0; rows];
        for (row, slot) in projected.iter_mut().enumerate() {
            let row_key = derive_key(&[DOMAIN_JL_SIGNS, seed, row as u64]);
            let mut acc = 0.0;
            for &(index, value) in vector.entries() {
                if stream_at(row_key, index) & 1 == 0 {
                    acc += value;
                } else {
                    acc -= value;
                }
            }
            *slot = acc * scale;
        }
        Ok(JlSketch {
            rows,
            projected,
            seed,
            dimension: vector.dimension(),
        })
    }

    pub fn from_parts(projected: Vec<f64>, seed: u64, dimension: u64) -> Result<Self> {
        if projected.is_empty() {
            return Err(Error::InvalidParameter("projection must be nonempty"));
        }
        Ok(JlSketch {
            rows: projected.len(),
            projected,
            seed,
            dimension,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn projected(&self) -> &[f64] {
        &self.projected
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    /// Inner product of the two projections.
    pub fn estimate(&self, other: &JlSketch) -> Result<f64> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        if self.rows != other.rows {
            return Err(Error::SketchMismatch("row count"));
        }
        if self.seed != other.seed {
            return Err(Error::SketchMismatch("seed"));
        }
        Ok(self
            .projected
            .iter()
            .zip(&other.projected)
            .map(|(&a, &b)| a * b)
            .sum())
    }
}

/// CountSketch table: `reps` rows of `buckets` signed-sum counters, with
/// 2-wise independent bucket and sign functions per repetition. The
/// estimate is the median over repetitions of the per-row dot products.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSketch {
    buckets: usize,
    reps: usize,
    table: Vec<f64>,
    seed: u64,
    dimension: u64,
}

impl CountSketch {
    pub fn build(vector: &SparseVector, buckets: usize, reps: usize, seed: u64) -> Result<Self> {
        if buckets == 0 {
            return Err(Error::InvalidParameter("bucket count must be at least 1"));
        }
        if reps == 0 {
            return Err(Error::InvalidParameter("repetition count must be at least 1"));
        }
        let mut table = vec![0.0; buckets * reps];
        for rep in 0..reps {
            let bucket_hash = PairwiseHash::from_seed(RepSeed::new(
                derive_key(&[DOMAIN_CS_BUCKET, seed]),
                rep as u32 + 1,
            ));
            let sign_hash = PairwiseHash::from_seed(RepSeed::new(
                derive_key(&[DOMAIN_CS_SIGN, seed]),
                rep as u32 + 1,
            ));
            let row = &mut table[rep * buckets..(rep + 1) * buckets];
            for &(index, value) in vector.entries() {
                let mixed = scramble_index(index);
                let bucket = (bucket_hash.raw(mixed) % buckets as u64) as usize;
                if sign_hash.raw(mixed) & 1 == 0 {
                    row[bucket] += value;
                } else {
                    row[bucket] -= value;
                }
            }
        }
        Ok(CountSketch {
            buckets,
            reps,
            table,
            seed,
            dimension: vector.dimension(),
        })
    }

    pub fn from_parts(
        table: Vec<f64>,
        buckets: usize,
        reps: usize,
        seed: u64,
        dimension: u64,
    ) -> Result<Self> {
        if buckets == 0 || reps == 0 || table.len() != buckets * reps {
            return Err(Error::InvalidParameter("table shape must be reps x buckets"));
        }
        Ok(CountSketch {
            buckets,
            reps,
            table,
            seed,
            dimension,
        })
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    fn check_compatible(&self, other: &CountSketch) -> Result<()> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        if self.buckets != other.buckets || self.reps != other.reps {
            return Err(Error::SketchMismatch("table shape"));
        }
        if self.seed != other.seed {
            return Err(Error::SketchMismatch("seed"));
        }
        Ok(())
    }

    /// Per-repetition dot products; each is an unbiased inner product
    /// estimate on its own.
    pub fn rep_estimates(&self, other: &CountSketch) -> Result<Vec<f64>> {
        self.check_compatible(other)?;
        Ok((0..self.reps)
            .map(|rep| {
                let a = &self.table[rep * self.buckets..(rep + 1) * self.buckets];
                let b = &other.table[rep * self.buckets..(rep + 1) * self.buckets];
                a.iter().zip(b).map(|(&x, &y)| x * y).sum()
            })
            .collect())
    }

    /// Median of the per-repetition estimates.
    pub fn estimate(&self, other: &CountSketch) -> Result<f64> {
        let mut reps = self.rep_estimates(other)?;
        Ok(math::median_in_place(&mut reps))
    }
}

/// KMV sketch: the `k` smallest hash values over the support, each kept
/// with its index and vector value. Since every support index is hashed
/// once, the kept entries sample the support without replacement.
#[derive(Clone, Debug, PartialEq)]
pub struct KmvSketch {
    budget: usize,
    // (hash, index, value), sorted by strictly increasing hash.
    entries: Vec<(f64, u64, f64)>,
    seed: u64,
    dimension: u64,
}

impl KmvSketch {
    pub fn build(vector: &SparseVector, budget: usize, seed: u64) -> Result<Self> {
        if budget < 2 {
            return Err(Error::InvalidParameter("sample budget must be at least 2"));
        }
        let hash = PairwiseHash::from_seed(RepSeed::new(derive_key(&[DOMAIN_KMV, seed]), 1));
        let mut entries: Vec<(f64, u64, f64)> = vector
            .entries()
            .iter()
            .map(|&(index, value)| (hash.evaluate(scramble_index(index)), index, value))
            .collect();
        entries.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        entries.truncate(budget);
        Ok(KmvSketch {
            budget,
            entries,
            seed,
            dimension: vector.dimension(),
        })
    }

    pub fn from_parts(
        entries: Vec<(f64, u64, f64)>,
        budget: usize,
        seed: u64,
        dimension: u64,
    ) -> Result<Self> {
        if budget < 2 || entries.len() > budget {
            return Err(Error::InvalidParameter(
                "entry count must not exceed the budget and budget must be at least 2",
            ));
        }
        for pair in entries.windows(2) {
            if pair[0].0 >= pair[1].0 {
                return Err(Error::InvalidParameter("hashes must strictly increase"));
            }
        }
        if entries.iter().any(|&(h, _, _)| !(h > 0.0 && h <= 1.0)) {
            return Err(Error::InvalidParameter("hash values must lie in (0, 1]"));
        }
        Ok(KmvSketch {
            budget,
            entries,
            seed,
            dimension,
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn entries(&self) -> &[(f64, u64, f64)] {
        &self.entries
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    /// Inner product estimate from the combined bottom-k sample.
    ///
    /// With `K` the union of the two sketches' hash sets: if `|K| < k` both
    /// sketches are complete, the sample is the full union, and the matched
    /// sum is exact. Otherwise `tau` is the k-th smallest hash in `K`, the
    /// union size is estimated as `(k-1)/tau`, and matched pairs below
    /// `tau` are scaled by `union_estimate / |K|`.
    pub fn estimate(&self, other: &KmvSketch) -> Result<f64> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        if self.budget != other.budget {
            return Err(Error::SketchMismatch("sample budget"));
        }
        if self.seed != other.seed {
            return Err(Error::SketchMismatch("seed"));
        }
        // Merge the two hash-sorted lists; equal hashes mean the same
        // support index, so products pair up during the walk.
        let mut combined = 0usize;
        let mut kth_smallest = 1.0f64;
        let mut matched: Vec<(f64, f64)> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let take_left = match (self.entries.get(i), other.entries.get(j)) {
                (Some(a), Some(b)) => {
                    if a.0 == b.0 {
                        matched.push((a.0, a.2 * b.2));
                        combined += 1;
                        if combined == self.budget {
                            kth_smallest = a.0;
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a.0 < b.0
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            let h = if take_left {
                let h = self.entries[i].0;
                i += 1;
                h
            } else {
                let h = other.entries[j].0;
                j += 1;
                h
            };
            combined += 1;
            if combined == self.budget {
                kth_smallest = h;
            }
        }
        if combined == 0 {
            return Ok(0.0);
        }
        if combined < self.budget {
            // Full-union regime: both sketches complete, estimate exact.
            return Ok(matched.iter().map(|&(_, p)| p).sum());
        }
        let tau = kth_smallest;
        let union_estimate = (self.budget as f64 - 1.0) / tau;
        let sum: f64 = matched
            .iter()
            .filter(|&&(h, _)| h < tau)
            .map(|&(_, p)| p)
            .sum();
        Ok(union_estimate / combined as f64 * sum)
    }
}
