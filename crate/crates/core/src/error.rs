use std::path::PathBuf;

/// Errors raised across the toolkit.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("TSP with {nodes} nodes exceeds the limit of {limit} for {op}")]
    TooManyNodes {
        nodes: usize,
        limit: usize,
        op: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no feasible decision satisfies the constraints")]
    Infeasible,
    #[error("non-finite value in {context}")]
    NonFinite { context: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset has no clean costs")]
    MissingCleanCosts,
    #[error("malformed {file}: {reason}")]
    Malformed { file: PathBuf, reason: String },
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(file: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Malformed {
            file: file.into(),
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}
