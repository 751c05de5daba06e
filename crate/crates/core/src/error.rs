use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid block structure: {0}")]
    InvalidStructure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),

    #[error("support enumeration too large: C({m}, {s}) = {count} exceeds limit {limit}")]
    EnumerationTooLarge {
        m: usize,
        s: usize,
        count: u128,
        limit: u128,
    },

    /// A parameter lies outside the region where a closed-form constant is defined.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("matrix is not positive definite at working precision")]
    NotPositiveDefinite,

    #[error("infeasible support estimate: {0}")]
    InfeasibleEstimate(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
