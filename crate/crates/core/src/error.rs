use std::path::PathBuf;

use thiserror::Error;

use crate::structure::Violation;

pub type Result<T> = std::result::Result<T, GnbError>;

#[derive(Debug, Error)]
pub enum GnbError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("class column not found: {0}")]
    ClassColumnNotFound(String),

    #[error("no rows remain after dropping incomplete rows")]
    NoRows,

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty variable set")]
    EmptyVarSet,

    #[error("variables {sub:?} are not a subset of {vars:?}")]
    NotSubset { sub: Vec<usize>, vars: Vec<usize> },

    #[error("need at least {needed} variables, got {got}")]
    TooFewVariables { needed: usize, got: usize },

    #[error("column index {0} out of range")]
    UnknownColumn(usize),

    #[error("approximating distribution is zero on a cell of positive probability")]
    AbsoluteContinuity,

    #[error("invalid structure: {0:?}")]
    InvalidStructure(Vec<Violation>),

    #[error("malformed arborescence: {0}")]
    MalformedArborescence(String),

    #[error("no arborescence rooted at 0 spans the graph")]
    NoArborescence,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty input")]
    EmptyInput,

    #[error("ROC AUC is undefined when only one class is present")]
    SingleClass,
}

impl GnbError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GnbError::Io {
            path: path.into(),
            source,
        }
    }
}
