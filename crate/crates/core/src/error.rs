use thiserror::Error;

use crate::multiindex::MultiIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(u32),
    #[error("n = {n}, r = {r} exceeds the configured limits (n <= {max_n}, r <= {max_r})")]
    LimitExceeded {
        n: usize,
        r: u32,
        max_n: usize,
        max_r: u32,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("face dimension {d} exceeds ambient dimension {n}")]
    FaceDimension { n: usize, d: usize },
    #[error("face index entries must lie in {{0, 1, 2}}")]
    InvalidFaceIndex,
    #[error("multi-index {0} is not a member of the set")]
    NotInSet(MultiIndex),
    #[error("multi-index {index} exceeds the grid order {r}")]
    IndexOutOfRange { index: MultiIndex, r: u32 },
    #[error("{0} is not componentwise below {1}")]
    NotBelow(MultiIndex, MultiIndex),
    #[error("set is not downward closed: {missing} missing below {member}")]
    NotLowerSet {
        member: MultiIndex,
        missing: MultiIndex,
    },
    #[error("missing data for {0}")]
    MissingData(MultiIndex),
    #[error("invalid grid coordinates: {0}")]
    InvalidCoordinates(String),
    #[error("confluent Vandermonde system is singular")]
    SingularSystem,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("Hermite re-indexing is not a bijection: {0}")]
    HermiteIndexing(String),
}
