use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    Dimension {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("row {row} has no permitted entries")]
    DegenerateRow { row: usize },

    #[error("backward requires a scalar loss, got shape {shape:?}")]
    NonScalarLoss { shape: Vec<usize> },

    #[error("attention window must be at least 1")]
    InvalidWindow,

    #[error("cannot extend a table of {base} rows to {target} rows: target must be a positive multiple")]
    Extension { base: usize, target: usize },

    #[error("sequence of length {len} exceeds the maximum of {max}")]
    Length { len: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("scorer error: {0}")]
    Scorer(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("training diverged at step {step}: loss is {loss}")]
    Divergence { step: u64, loss: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, left: &[usize], right: &[usize]) -> Self {
        Error::Dimension {
            op,
            left: left.to_vec(),
            right: right.to_vec(),
        }
    }
}
