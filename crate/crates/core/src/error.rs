use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed scalar `{0}`")]
    Scalar(String),
    #[error("malformed document: {0}")]
    Document(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("circuit not in skeleton normal form: {0}")]
    Shape(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("expected real coefficients")]
    NotReal,
    #[error("solver backend: {0}")]
    Backend(String),
    #[error("search exhausted after {0} candidates without an accepted set")]
    Exhausted(usize),
    #[error("no nonzero solution: {0}")]
    Infeasible(String),
    #[error("refusing to run: estimated cost {estimate} exceeds cap {cap}")]
    Cost { estimate: String, cap: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
