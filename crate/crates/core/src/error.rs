use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("{what} = {value} is outside {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected degree {expected}, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("non-finite integrand value {value} at quadrature node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, range: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value,
            range: range.into(),
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Parse { .. }
            | Error::Validation { .. }
            | Error::InvalidPoint(_)
            | Error::Domain { .. }
            | Error::Shape { .. } => 2,
            Error::NonFinite { .. } | Error::NoConvergence { .. } => 3,
            Error::Io { .. } => 4,
        }
    }
}
