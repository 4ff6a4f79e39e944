use thiserror::Error;

/// Errors produced by table construction, model building, and sampling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not in the kernel of the design matrix")]
    NotAMove,

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("integer overflow during exact arithmetic")]
    Overflow,

    #[error("fiber enumeration was truncated at {cap} members; rerun with a larger cap")]
    TruncatedFiber { cap: usize },

    #[error("empty statistic stream: chain produced no kept samples")]
    EmptyStream,

    #[error("fit did not converge; cannot simulate from it")]
    NonconvergedFit,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
