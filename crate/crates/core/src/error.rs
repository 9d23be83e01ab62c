use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate derivative: {0}")]
    DegenerateDerivative(String),
    #[error("resource budget exceeded after reaching radius {reached}: {msg}")]
    Resource { msg: String, reached: usize },
    #[error("incompatible pair: max defect {defect:e} exceeds tolerance {tol:e}")]
    Incompatible { defect: f64, tol: f64 },
    #[error("bad parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Prefixes the message with the name of the node or stage that failed.
    pub fn context(self, at: &str) -> Error {
        let pre = |m: String| if m.starts_with(at) { m } else { format!("{at}: {m}") };
        match self {
            Error::Domain(m) => Error::Domain(pre(m)),
            Error::Range(m) => Error::Range(pre(m)),
            Error::Unsupported(m) => Error::Unsupported(pre(m)),
            Error::Precondition(m) => Error::Precondition(pre(m)),
            Error::DegenerateDerivative(m) => Error::DegenerateDerivative(pre(m)),
            Error::Dimension(m) => Error::Dimension(pre(m)),
            other => other,
        }
    }
}
