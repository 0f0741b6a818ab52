use thiserror::Error;

/// Failures reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidSpec(String),

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cell {coords:?} lies outside a grid of side {n}")]
    OutOfRange { coords: Vec<usize>, n: usize },

    #[error("placement is not a bijection: {0}")]
    NotABijection(String),

    #[error("invalid symbol pair: {0}")]
    InvalidSymbol(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The code broke one of its own invariants. Always a bug.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("instance has {cells} cells; exhaustive search is limited to {limit}")]
    TooLarge { cells: usize, limit: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
