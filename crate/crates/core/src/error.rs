use std::path::PathBuf;

use thiserror::Error;

use crate::election::ResourceId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("resource {0} is not part of the election")]
    UnknownResource(ResourceId),

    #[error("resource {0} appears more than once in the committee")]
    DuplicateMember(ResourceId),

    #[error("resource {0} is already in the committee")]
    AlreadySelected(ResourceId),

    #[error("committee size {k} exceeds the number of resources ({m})")]
    CommitteeTooLarge { k: usize, m: usize },

    #[error("committee size must be at least 1")]
    EmptyCommittee,

    #[error("utility for resource {resource} must be finite and nonnegative, got {value}")]
    InvalidUtility { resource: ResourceId, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "C({m},{k}) = {count} committees exceeds the enumeration cap of {cap}; \
         use the greedy or annealing solver instead"
    )]
    EnumerationCap { m: usize, k: usize, count: u128, cap: u128 },

    #[error("query has no supporters: no agent approves any query resource")]
    NoSupporters,

    #[error("local election for the query is empty: no related resources")]
    NoResults,

    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow { path: String, line: u64, reason: String },

    #[error("cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("unsupported cache format version {found} (expected {expected})")]
    CacheVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
