//! Shared generators for the statistical test suites.

use ipsketch_core::SparseVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random vector with exactly `nnz` nonzero entries, values uniform in
/// `[-2, 2]` excluding a small band around zero.
pub fn random_vector(rng: &mut ChaCha8Rng, dimension: u64, nnz: usize) -> SparseVector {
    let mut indices: Vec<u64> = (1..=dimension).collect();
    indices.shuffle(rng);
    indices.truncate(nnz);
    let entries = indices
        .into_iter()
        .map(|i| (i, nonzero_value(rng)))
        .collect();
    SparseVector::new(dimension, entries).unwrap()
}

/// Pair of vectors with supports of size `nnz` sharing exactly `shared`
/// indices.
pub fn random_pair(
    rng: &mut ChaCha8Rng,
    dimension: u64,
    nnz: usize,
    shared: usize,
) -> (SparseVector, SparseVector) {
    assert!(shared <= nnz);
    assert!(2 * nnz - shared <= dimension as usize);
    let mut indices: Vec<u64> = (1..=dimension).collect();
    indices.shuffle(rng);
    let shared_idx = &indices[..shared];
    let a_only = &indices[shared..nnz];
    let b_only = &indices[nnz..2 * nnz - shared];
    let a_entries = shared_idx
        .iter()
        .chain(a_only)
        .map(|&i| (i, nonzero_value(rng)))
        .collect();
    let b_entries = shared_idx
        .iter()
        .chain(b_only)
        .map(|&i| (i, nonzero_value(rng)))
        .collect();
    (
        SparseVector::new(dimension, a_entries).unwrap(),
        SparseVector::new(dimension, b_entries).unwrap(),
    )
}

pub fn nonzero_value(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = rng.gen_range(-2.0..2.0);
        if v.abs() > 0.05 {
            return v;
        }
    }
}

/// Binary vector on the given support.
pub fn binary_vector(dimension: u64, support: &[u64]) -> SparseVector {
    SparseVector::new(dimension, support.iter().map(|&i| (i, 1.0)).collect()).unwrap()
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_unstable_by(|x, y| x.total_cmp(y));
    b.sort_unstable_by(|x, y| x.total_cmp(y));
    let (mut i, mut j) = (0usize, 0usize);
    let mut stat: f64 = 0.0;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        stat = stat.max((fa - fb).abs());
    }
    stat
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
pub fn ks_one_sample(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_unstable_by(|x, y| x.total_cmp(y));
    let n = sample.len() as f64;
    let mut stat: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        stat = stat.max((f - i as f64 / n).abs());
        stat = stat.max(((i + 1) as f64 / n - f).abs());
    }
    stat
}
