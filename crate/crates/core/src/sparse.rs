//! Sparse vectors with exact inner products, norms, and support utilities.
//!
//! Every estimator in the crate consumes these, and the exact routines
//! double as the ground truth the sketch estimators are tested against.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Sparse vector over a 1-based index domain `[1, dimension]`.
///
/// Entries are `(index, value)` pairs sorted by strictly increasing index;
/// stored values are never zero. Construction rejects duplicate indices
/// rather than aggregating them.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    dimension: u64,
    entries: Vec<(u64, f64)>,
}

impl SparseVector {
    /// Builds a vector from `(index, value)` pairs in any order. Exact
    /// zeros are dropped; duplicate or out-of-range indices and non-finite
    /// values are errors.
    pub fn new(dimension: u64, mut entries: Vec<(u64, f64)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1"));
        }
        for &(index, value) in &entries {
            if !value.is_finite() {
                return Err(Error::InvalidParameter("values must be finite"));
            }
            if index == 0 || index > dimension {
                return Err(Error::IndexOutOfRange { index, dimension });
            }
        }
        entries.retain(|&(_, value)| value != 0.0);
        entries.sort_unstable_by_key(|&(index, _)| index);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateIndex(pair[0].0));
            }
        }
        Ok(SparseVector { dimension, entries })
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at `index`, zero if absent.
    pub fn value_at(&self, index: u64) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Exact inner product, summed over shared indices by a merge walk.
    pub fn inner(&self, other: &SparseVector) -> Result<f64> {
        self.check_dimension(other)?;
        let (mut i, mut j) = (0, 0);
        let mut sum = 0.0;
        while i < self.entries.len() && j < other.entries.len() {
            let (ai, av) = self.entries[i];
            let (bi, bv) = other.entries[j];
            if ai == bi {
                sum += av * bv;
                i += 1;
                j += 1;
            } else if ai < bi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(sum)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        math::sqrt(self.entries.iter().map(|&(_, v)| v * v).sum())
    }

    /// Both inputs restricted to the intersection of their supports.
    pub fn restrict_to_intersection(
        &self,
        other: &SparseVector,
    ) -> Result<(SparseVector, SparseVector)> {
        self.check_dimension(other)?;
        let (mut i, mut j) = (0, 0);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while i < self.entries.len() && j < other.entries.len() {
            let (ai, av) = self.entries[i];
            let (bi, bv) = other.entries[j];
            if ai == bi {
                left.push((ai, av));
                right.push((bi, bv));
                i += 1;
                j += 1;
            } else if ai < bi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok((
            SparseVector {
                dimension: self.dimension,
                entries: left,
            },
            SparseVector {
                dimension: self.dimension,
                entries: right,
            },
        ))
    }

    /// Entrywise scaling. The factor must be finite and nonzero so the
    /// no-stored-zeros invariant survives.
    pub fn scaled(&self, factor: f64) -> Result<SparseVector> {
        if !factor.is_finite() || factor == 0.0 {
            return Err(Error::InvalidParameter("scale factor must be finite and nonzero"));
        }
        Ok(SparseVector {
            dimension: self.dimension,
            entries: self
                .entries
                .iter()
                .map(|&(index, value)| (index, value * factor))
                .collect(),
        })
    }

    pub(crate) fn check_dimension(&self, other: &SparseVector) -> Result<()> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    // Key/value columns of the two worked example tables.
    pub(crate) const TABLE_A: [(u64, f64); 9] = [
        (1, 6.0),
        (3, 2.0),
        (4, 6.0),
        (5, 1.0),
        (6, 4.0),
        (7, 2.0),
        (8, 2.0),
        (9, 8.0),
        (11, 3.0),
    ];
    pub(crate) const TABLE_B: [(u64, f64); 9] = [
        (2, 1.0),
        (4, 5.0),
        (5, 1.0),
        (8, 2.0),
        (10, 4.0),
        (11, 2.5),
        (12, 6.0),
        (15, 6.0),
        (16, 3.7),
    ];

    fn value_vec(entries: &[(u64, f64)]) -> SparseVector {
        SparseVector::new(16, entries.to_vec()).unwrap()
    }

    fn indicator_vec(entries: &[(u64, f64)]) -> SparseVector {
        SparseVector::new(16, entries.iter().map(|&(i, _)| (i, 1.0)).collect()).unwrap()
    }

    #[test]
    fn example_tables_inner_products() {
        let values_a = value_vec(&TABLE_A);
        let keys_a = indicator_vec(&TABLE_A);
        let keys_b = indicator_vec(&TABLE_B);
        // Post-join SUM of A's values and the join size.
        assert_eq!(values_a.inner(&keys_b).unwrap(), 12.0);
        assert_eq!(keys_a.inner(&keys_b).unwrap(), 4.0);
    }

    #[test]
    fn disjoint_supports_have_zero_inner_product() {
        let a = SparseVector::new(10, vec![(1, 2.0), (3, 4.0)]).unwrap();
        let b = SparseVector::new(10, vec![(2, 5.0), (4, 1.0)]).unwrap();
        assert_eq!(a.inner(&b).unwrap(), 0.0);
    }

    #[test]
    fn norm_cases() {
        let single = SparseVector::new(4, vec![(2, 3.0)]).unwrap();
        assert_eq!(single.norm(), 3.0);
        let empty = SparseVector::new(4, vec![]).unwrap();
        assert_eq!(empty.norm(), 0.0);
        let pyth = SparseVector::new(4, vec![(1, 3.0), (2, 4.0)]).unwrap();
        assert_eq!(pyth.norm(), 5.0);
    }

    #[test]
    fn restriction_keeps_shared_support() {
        let a = value_vec(&TABLE_A);
        let b = value_vec(&TABLE_B);
        let (ai, bi) = a.restrict_to_intersection(&b).unwrap();
        assert_eq!(ai.entries(), &[(4, 6.0), (5, 1.0), (8, 2.0), (11, 3.0)]);
        assert_eq!(bi.entries(), &[(4, 5.0), (5, 1.0), (8, 2.0), (11, 2.5)]);
    }

    #[test]
    fn restriction_of_identical_vectors_is_identity() {
        let a = value_vec(&TABLE_A);
        let (l, r) = a.restrict_to_intersection(&a).unwrap();
        assert_eq!(l, a);
        assert_eq!(r, a);
    }

    #[test]
    fn restriction_of_disjoint_vectors_is_empty() {
        let a = SparseVector::new(10, vec![(1, 2.0)]).unwrap();
        let b = SparseVector::new(10, vec![(2, 5.0)]).unwrap();
        let (l, r) = a.restrict_to_intersection(&b).unwrap();
        assert!(l.is_empty());
        assert!(r.is_empty());
    }

    #[test]
    fn zeros_are_dropped_and_duplicates_rejected() {
        let v = SparseVector::new(5, vec![(3, 0.0), (1, 2.0)]).unwrap();
        assert_eq!(v.entries(), &[(1, 2.0)]);
        assert_eq!(
            SparseVector::new(5, vec![(2, 1.0), (2, 3.0)]),
            Err(Error::DuplicateIndex(2))
        );
    }

    #[test]
    fn index_bounds_are_enforced() {
        assert_eq!(
            SparseVector::new(5, vec![(0, 1.0)]),
            Err(Error::IndexOutOfRange {
                index: 0,
                dimension: 5
            })
        );
        assert_eq!(
            SparseVector::new(5, vec![(6, 1.0)]),
            Err(Error::IndexOutOfRange {
                index: 6,
                dimension: 5
            })
        );
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = SparseVector::new(5, vec![(1, 1.0)]).unwrap();
        let b = SparseVector::new(6, vec![(1, 1.0)]).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.restrict_to_intersection(&b).is_err());
    }

    #[test]
    fn value_lookup() {
        let a = value_vec(&TABLE_A);
        assert_eq!(a.value_at(4), 6.0);
        assert_eq!(a.value_at(2), 0.0);
    }
}
