use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular system on support {support:?}")]
    Singular { support: Vec<String> },

    #[error("intersection matrix on {curves:?} is not negative definite")]
    NotNegativeDefinite { curves: Vec<String> },

    #[error("unknown curve `{0}`")]
    UnknownCurve(String),

    #[error("duplicate curve name `{0}`")]
    DuplicateCurve(String),

    #[error("inconsistent incidences: {0}")]
    InconsistentIncidence(String),

    #[error("blow-up requested on a singular model")]
    NotSmooth,

    #[error("no Zariski decomposition within tracked curves: {0}")]
    NoZariskiDecomposition(String),

    #[error("point is not redundant: mult_p(N + boundary) = {mult}")]
    NotRedundant { mult: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid dual graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
