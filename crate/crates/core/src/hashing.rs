//! Seedable hash primitives shared by the sampling-based sketches.
//!
//! Two building blocks live here. [`PairwiseHash`] is a 2-wise independent
//! linear hash over a fixed prime field that maps 1-based indices to the
//! half-open unit interval `(0, 1]`. [`PrefixMinRecords`] realizes the
//! running minimum of a block of implicit i.i.d. unit uniforms with
//! geometric skips, so the minimum hash over the first `T` positions of a
//! block costs expected `O(log T)` work instead of `T` hash evaluations.
//!
//! Everything is a pure function of a [`RepSeed`]: two processes that share
//! a master seed see identical hash realizations, which is what makes
//! independently built sketches comparable.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Modulus of the linear hash: the Mersenne prime `2^61 - 1`.
///
/// Recorded in serialized sketch headers; sketches built over a different
/// modulus are not comparable. A 61-bit prime keeps the hash aperiodic for
/// expanded-vector domains far beyond `2^31`.
pub const HASH_MODULUS: u64 = (1u64 << 61) - 1;

/// Identifier of the seed-expansion generator, recorded in sketch headers.
///
/// Streams are counter-based SplitMix64: output `c` of the stream keyed by
/// `k` is `mix64(k + (c + 1) * 0x9e3779b97f4a7c15)` with the standard
/// SplitMix64 finalizer, and key words are folded in with the same mixer.
pub const PRNG_ID: &str = "splitmix64";

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

// Leading key words keep the hash-coefficient, block-record, and
// seed-derivation streams disjoint.
const DOMAIN_HASH_COEFF: u64 = 0x01;
const DOMAIN_BLOCK_RECORDS: u64 = 0x02;
const DOMAIN_SEED_DERIVE: u64 = 0x03;
pub(crate) const DOMAIN_JL_SIGNS: u64 = 0x04;
pub(crate) const DOMAIN_CS_BUCKET: u64 = 0x05;
pub(crate) const DOMAIN_CS_SIGN: u64 = 0x06;
pub(crate) const DOMAIN_KMV: u64 = 0x07;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Output `counter` of the SplitMix64 stream keyed by `key`.
#[inline]
pub(crate) fn stream_at(key: u64, counter: u64) -> u64 {
    mix64(key.wrapping_add(GOLDEN.wrapping_mul(counter.wrapping_add(1))))
}

/// Folds key words into a single stream key.
pub(crate) fn derive_key(words: &[u64]) -> u64 {
    let mut key = 0u64;
    for &word in words {
        key = mix64(key.wrapping_add(GOLDEN) ^ word);
    }
    key
}

/// Maps 64 random bits to the half-open interval `(0, 1]`.
#[inline]
pub(crate) fn unit_closed(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps 64 random bits to the open interval `(0, 1)`. Uses 52 bits so the
/// half offset stays exactly representable at the top of the range.
#[inline]
pub(crate) fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Derives `count` independent master seeds from one master seed; used to
/// seed the sketch pairs of the median-of-estimates boosters.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    let key = derive_key(&[DOMAIN_SEED_DERIVE, master]);
    (0..count).map(|i| stream_at(key, i as u64)).collect()
}

/// Fixed bijective mixer the sketch modules apply to support indices
/// before hashing.
///
/// A bare linear hash maps consecutive indices to an arithmetic
/// progression mod `p`, whose joint minimum statistics differ measurably
/// from i.i.d. uniforms on structured supports. Mixing the index first
/// destroys that structure while keeping the composed map 2-wise
/// independent and identical across processes, so coordinated sketches
/// still see the same hash realizations.
#[inline]
pub fn scramble_index(index: u64) -> u64 {
    mix64(index)
}

/// Master seed plus 1-based repetition index. The pair fully determines the
/// repetition's hash function, identically in every process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RepSeed {
    pub master: u64,
    pub repetition: u32,
}

impl RepSeed {
    pub fn new(master: u64, repetition: u32) -> Self {
        debug_assert!(repetition >= 1, "repetition index is 1-based");
        RepSeed { master, repetition }
    }
}

/// 2-wise independent linear hash `i -> ((a*i + b) mod p + 1) / p`.
///
/// Outputs lie in `(0, 1]`; zero is unreachable, so the union estimators
/// built on sums of these values never divide by zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairwiseHash {
    multiplier: u64,
    offset: u64,
    modulus: u64,
}

impl PairwiseHash {
    /// Expands a seed into coefficients over [`HASH_MODULUS`]. The
    /// multiplier is always nonzero; identical seeds yield identical
    /// coefficients in every process.
    pub fn from_seed(seed: RepSeed) -> Self {
        let key = derive_key(&[DOMAIN_HASH_COEFF, seed.master, seed.repetition as u64]);
        let multiplier = 1 + stream_at(key, 0) % (HASH_MODULUS - 1);
        let offset = stream_at(key, 1) % HASH_MODULUS;
        PairwiseHash {
            multiplier,
            offset,
            modulus: HASH_MODULUS,
        }
    }

    /// Builds a hash with explicit coefficients and modulus. Intended for
    /// tests and diagnostics; `from_seed` is the production path.
    pub fn with_params(multiplier: u64, offset: u64, modulus: u64) -> Self {
        debug_assert!(modulus >= 2);
        PairwiseHash {
            multiplier,
            offset,
            modulus,
        }
    }

    /// Residue `(a*index + b) mod p` before mapping to the unit interval.
    #[inline]
    pub fn raw(&self, index: u64) -> u64 {
        let wide = self.multiplier as u128 * index as u128 + self.offset as u128;
        if self.modulus == HASH_MODULUS {
            reduce_m61(wide)
        } else {
            (wide % self.modulus as u128) as u64
        }
    }

    /// Hash of a 1-based index, in `(0, 1]`.
    #[inline]
    pub fn evaluate(&self, index: u64) -> f64 {
        (self.raw(index) + 1) as f64 / self.modulus as f64
    }
}

/// Reduction modulo `2^61 - 1` by folding 61-bit limbs.
#[inline]
fn reduce_m61(x: u128) -> u64 {
    const P: u64 = HASH_MODULUS;
    let lo = (x as u64) & P;
    let mid = ((x >> 61) as u64) & P;
    let hi = (x >> 122) as u64;
    let mut sum = lo + mid + hi;
    sum = (sum & P) + (sum >> 61);
    if sum >= P {
        sum -= P;
    }
    sum
}

/// Successive prefix minima of one length-`block_len` block of implicit
/// i.i.d. `(0, 1]` uniforms.
///
/// Record `k` is `(position, value)` where `value` is the running minimum
/// over block positions `1..=position`; positions are strictly increasing
/// starting at 1, values strictly decreasing. The step from one record to
/// the next is geometric with success probability equal to the current
/// minimum, and each new minimum is uniform below the previous one, which
/// realizes the same process as hashing every position independently.
///
/// The sequence is a deterministic function of `(seed, block)`: records
/// up to any prefix do not depend on how far the sequence was generated,
/// so prefix queries of different lengths are restrictions of one another.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixMinRecords {
    block_len: u64,
    records: Vec<(u64, f64)>,
}

impl PrefixMinRecords {
    /// Realizes all records with position at most `block_len`.
    pub fn generate(seed: RepSeed, block: u64, block_len: u64) -> Self {
        let mut records = Vec::new();
        if block_len == 0 {
            return PrefixMinRecords { block_len, records };
        }
        let key = derive_key(&[
            DOMAIN_BLOCK_RECORDS,
            seed.master,
            seed.repetition as u64,
            block,
        ]);
        let mut counter = 0u64;
        let mut position = 1u64;
        let mut value = unit_closed(stream_at(key, counter));
        counter += 1;
        records.push((position, value));
        loop {
            // Next improving position is a geometric step away, with
            // success probability equal to the current minimum.
            let u = unit_open(stream_at(key, counter));
            counter += 1;
            let step = math::floor(math::ln(u) / math::ln_1p(-value)) + 1.0;
            // Saturating cast: an out-of-range step just ends the block.
            let next = position.saturating_add(step as u64);
            if next > block_len || next <= position {
                break;
            }
            position = next;
            value *= unit_open(stream_at(key, counter));
            counter += 1;
            records.push((position, value));
        }
        PrefixMinRecords { block_len, records }
    }

    pub fn block_len(&self) -> u64 {
        self.block_len
    }

    pub fn records(&self) -> &[(u64, f64)] {
        &self.records
    }

    /// Minimum value and its position among block positions
    /// `1..=prefix_len`; `None` for an empty prefix.
    pub fn min_at(&self, prefix_len: u64) -> Option<(f64, u64)> {
        let mut best = None;
        for &(position, value) in &self.records {
            if position > prefix_len {
                break;
            }
            best = Some((value, position));
        }
        best
    }
}

/// Minimum hash value (and its position) among positions `1..=prefix_len`
/// of `block`, as a deterministic function of `(seed, block, prefix_len)`.
///
/// Monotone nonincreasing in `prefix_len`, and for `t1 <= t2` the result at
/// `t1` is the restriction of the record sequence used at `t2`.
pub fn block_prefix_min(
    seed: RepSeed,
    block: u64,
    prefix_len: u64,
    block_len: u64,
) -> Result<Option<(f64, u64)>> {
    if prefix_len > block_len {
        return Err(Error::PrefixTooLong {
            prefix: prefix_len,
            block_len,
        });
    }
    if prefix_len == 0 {
        return Ok(None);
    }
    Ok(PrefixMinRecords::generate(seed, block, prefix_len).min_at(prefix_len))
}
