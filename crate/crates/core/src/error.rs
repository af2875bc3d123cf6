use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported jet shape: dim {dim}, order {order} (dim must be 1..=4, order 0..=6)")]
    UnsupportedShape { dim: usize, order: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("requested derivative of order {requested} but the jet only carries order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("insufficient jet order: need at least {needed}, have {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error(
        "requested order {requested} is beyond determinacy order {cap}: \
         v_k is only determined for k <= (n+m)/2 when n+m is an even integer"
    )]
    BeyondDeterminacy { requested: usize, cap: usize },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("function `{name}` expects {expected} argument(s), got {found} (at byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("constraint violated: {0}")]
    Constraint(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidStructure(msg.into())
    }
}
