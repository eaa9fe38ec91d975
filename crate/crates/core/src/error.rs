use thiserror::Error;

/// Errors produced while building spaces, evaluating kernels or parsing inputs.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    /// Malformed text input; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A factorization or normalization broke down.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn point(msg: impl Into<String>) -> Self {
        Error::InvalidPoint(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// True when the error stems from a numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
