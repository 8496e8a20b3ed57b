use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("row {row} not stochastic (sums to {sum})")]
    NotStochastic { row: String, sum: f64 },

    #[error("negative probability {value} in row {row}")]
    NegativeProbability { row: String, value: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("scheme mode {found} is not compatible with {expected}")]
    ModeMismatch { expected: String, found: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),

    #[error("enumeration size {needed} exceeds guard {guard}")]
    GuardExceeded { needed: u128, guard: u128 },

    #[error("atypical state sequence: every likelihood weight is zero")]
    AtypicalState,

    #[error("unknown example channel `{0}`")]
    UnknownExample(String),

    #[error("unknown bound `{name}`; valid bounds: {valid}")]
    UnknownBound { name: String, valid: String },

    #[error("linear program failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            msg: err.to_string(),
        }
    }
}
