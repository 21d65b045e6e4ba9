//! Error type shared by all sketch constructors and estimators.

use core::fmt;

/// Errors reported by sketch construction, estimation, and encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Two vectors or sketches declare different dimensions.
    DimensionMismatch { left: u64, right: u64 },
    /// Two sketches disagree on the named parameter (seed, sample count,
    /// discretization, strategy, or method) and cannot be estimated together.
    SketchMismatch(&'static str),
    /// The operation needs at least one nonzero entry.
    EmptyVector,
    /// A parameter violates its documented range.
    InvalidParameter(&'static str),
    /// The same index appeared twice in construction input.
    DuplicateIndex(u64),
    /// An index lies outside `[1, dimension]`.
    IndexOutOfRange { index: u64, dimension: u64 },
    /// A value column was required but the column carries keys only.
    MissingValues,
    /// Rounding input must have unit Euclidean norm.
    NotUnitNorm,
    /// A block prefix query exceeded the block length.
    PrefixTooLong { prefix: u64, block_len: u64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::SketchMismatch(field) => {
                write!(f, "sketches are not comparable: {field} differs")
            }
            Error::EmptyVector => write!(f, "vector has no nonzero entries"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DuplicateIndex(index) => write!(f, "duplicate index {index}"),
            Error::IndexOutOfRange { index, dimension } => {
                write!(f, "index {index} outside [1, {dimension}]")
            }
            Error::MissingValues => write!(f, "column has no value list"),
            Error::NotUnitNorm => write!(f, "input vector must have unit norm"),
            Error::PrefixTooLong { prefix, block_len } => {
                write!(f, "prefix length {prefix} exceeds block length {block_len}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
