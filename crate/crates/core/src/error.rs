use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A metric or coordinate left its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Data fails the zero-mean condition a gauged solve requires.
    #[error("compatibility error in {context}: mean {mean:e} exceeds tolerance {tolerance:e}")]
    Compatibility { context: String, mean: f64, tolerance: f64 },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Prefixes the message with the order that produced it.
    pub fn at_order(self, order: i64) -> Self {
        match self {
            Error::Compatibility {
                context,
                mean,
                tolerance,
            } => Error::Compatibility {
                context: format!("order {order}: {context}"),
                mean,
                tolerance,
            },
            Error::Internal(m) => Error::Internal(format!("order {order}: {m}")),
            other => other,
        }
    }
}
