use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("degenerate input: {0} has zero variance")]
    DegenerateInput(&'static str),
    #[error("sample too small: n = {n}, at least {min} required")]
    SampleTooSmall { n: usize, min: usize },
    #[error("sample too large: n = {n}, at most {max} supported")]
    SampleTooLarge { n: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = MeasureError> = std::result::Result<T, E>;

/// Errors raised by the power engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}
