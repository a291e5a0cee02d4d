use std::io;

use thiserror::Error;

/// Statistics carried out of a Buchberger run that hit its pair budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialStats {
    pub pairs_processed: usize,
    pub reductions_to_zero: usize,
    pub basis_len: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{0} requires a nonzero polynomial")]
    ZeroPolynomial(&'static str),

    #[error("pair budget of {limit} exceeded after {} pairs (basis had {} elements)", .stats.pairs_processed, .stats.basis_len)]
    BudgetExceeded { limit: usize, stats: PartialStats },

    #[error("rank {rank} out of range for {count} monomials")]
    RankOutOfRange { rank: u128, count: u128 },

    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("r-squared undefined: observed values have zero variance")]
    UndefinedVariance,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("unsupported format version {found} (expected {expected})")]
    Version { expected: u32, found: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
