use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("polarity mismatch: expected {expected:?}, found {found:?}")]
    PolarityMismatch {
        expected: crate::Polarity,
        found: crate::Polarity,
    },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("document contains no foreground pixels")]
    EmptyDocument,
    #[error("no cells found")]
    NoCellsFound,
    #[error("empty cell list")]
    EmptyCellList,
    #[error("inconsistent grid: cell {cell} matches {clusters} {axis} clusters")]
    InconsistentGrid {
        cell: usize,
        clusters: usize,
        axis: &'static str,
    },
    #[error("unknown page `{0}`")]
    UnknownPage(String),
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
