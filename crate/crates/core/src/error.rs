use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} outside the domain [{lower}, {upper}] of {what}")]
    Domain {
        what: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("zero fluid velocity at y-node {node}; r coefficient is singular")]
    ZeroVelocity { node: usize },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid physical parameters: {0}")]
    Params(String),

    #[error("singular matrix: pivot magnitude {pivot:e} at column {column}")]
    Singular { column: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("{needed} variables exceed the enumeration capacity of {limit}")]
    Capacity { needed: usize, limit: usize },

    #[error("non-finite objective value {value} at evaluation {eval}")]
    NonFinite { eval: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("marching step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The innermost error, looking through step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures caused by bad user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self.root(),
            Error::Config(_) | Error::Parse(_) | Error::Mesh(_) | Error::Params(_)
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self.root(), Error::Io { .. })
    }
}
