use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("mismatched shapes: {0}")]
    MismatchedShapes(String),
    #[error("bad tie policy: {0}")]
    BadPolicy(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("graph is not Eulerian: {0}")]
    NotEulerian(String),
    #[error("invalid group size p={0}: must be odd and at least 3")]
    InvalidP(usize),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
