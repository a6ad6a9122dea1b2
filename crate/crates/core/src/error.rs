use thiserror::Error;

/// Errors raised while loading instances or running solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("dimension mismatch in {record}: {detail}")]
    Dimension { record: String, detail: String },
    #[error("empty set family")]
    EmptyFamily,
    #[error("coverage error: element {0} lies in no outlier set")]
    Coverage(usize),
    #[error("triangle inequality violated by ({0}, {1}, {2})")]
    Triangle(usize, usize, usize),
    #[error("index {index} out of range in {what}")]
    Index { what: String, index: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("refused: {0}")]
    CapExceeded(String),
    #[error("query is not acyclic")]
    NotAcyclic,
    #[error("sampling from an empty region")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
