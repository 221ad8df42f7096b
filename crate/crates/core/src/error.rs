use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero vector has no rank-1 form")]
    ZeroVector,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("form is not positive semi-definite")]
    NotPsd,
    #[error("form is not perfect")]
    NotPerfect,
    #[error("form has rank {0}, at least 2 is required")]
    RankTooLow(usize),
    #[error("minimal norms differ: {0} vs {1}")]
    MinNormMismatch(String, String),
    #[error("face does not meet the interior of its cone (rank {rank} < {ambient})")]
    NotMeetingInterior { rank: usize, ambient: usize },
    #[error("facet {0} does not bound a neighbouring perfect form")]
    FacetUnbounded(usize),
    #[error("search overflow: {0}")]
    SearchOverflow(String),
    #[error("search bound {0} exceeded")]
    SearchBoundExceeded(i64),
    #[error("dimension {0} exceeds the supported maximum {1} (use force to override)")]
    DimensionTooLarge(usize, usize),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid facet index {0}")]
    InvalidFacet(usize),
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
