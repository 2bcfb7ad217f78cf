use thiserror::Error;

/// Errors produced by graph parsing, operator construction, and the
/// numerical verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("json parse error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration cap exceeded: {0}")]
    EnumerationCap(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("undefined radius: every cycle count up to length {0} vanishes")]
    UndefinedRadius(usize),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("lattice membership: {0}")]
    LatticeMembership(String),

    #[error("non-commuting generators: {0}")]
    NonCommuting(String),

    #[error("singular evaluation point: {0}")]
    SingularPoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
