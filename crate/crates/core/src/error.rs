//! Error types.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Failures while parsing or validating basket text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasketError {
    #[error("unexpected `{token}` at offset {offset} in basket text")]
    Syntax { token: String, offset: usize },
    #[error("invalid pair ({b},{r}): need r >= 2 and 0 < 2b <= r")]
    InvalidPair { b: u64, r: u64 },
    #[error("multiplicity must be at least 1 (offset {offset})")]
    ZeroMultiplicity { offset: usize },
    #[error("number `{token}` at offset {offset} is out of range")]
    Overflow { token: String, offset: usize },
}

/// Violated preconditions of the basket calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("r_max is undefined for the empty basket")]
    EmptyBasket,
    #[error("entry index {index} out of range for a basket of {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cannot pack an entry with itself")]
    SameEntry,
    #[error("order must be at least {min}, got {got}")]
    OrderTooSmall { min: u32, got: u32 },
    #[error("canonical level {0} is undefined (levels are 0 or >= 5)")]
    UndefinedLevel(u32),
    #[error("fraction {0} is outside (0, 1/2]")]
    FractionOutOfRange(String),
}

/// A search stopped at its resource limit before finishing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("search truncated after visiting {visited} states (limit {limit})")]
pub struct Truncated {
    pub visited: usize,
    pub limit: usize,
}

/// Problems with a classification constraint set.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("malformed constraint `{0}`")]
    Malformed(String),
    #[error("unknown constraint key `{0}`")]
    UnknownKey(String),
    #[error("unknown filter set `{0}`")]
    UnknownFilter(String),
    #[error("constraint set does not bound the search: {0}")]
    Unbounded(&'static str),
    #[error("conflicting values for `{0}`")]
    Conflict(String),
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Truncated(#[from] Truncated),
}

/// Problems loading or checking fixture data.
#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("no fixture for table {0}")]
    Missing(u32),
    #[error("fixture {file}, line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("checksum mismatch for {file}: manifest {expected}, actual {actual}")]
    Checksum {
        file: String,
        expected: String,
        actual: String,
    },
    #[error("fixture manifest problem: {0}")]
    Manifest(String),
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}
