use thiserror::Error;

/// Errors produced by the tomography pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}; expected 2 or 4")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("normalization underflow: the record has vanishing probability for this state")]
    Underflow,

    #[error("records do not share a measurement configuration and control")]
    ConfigMismatch,

    #[error("every candidate assigns zero likelihood to the data")]
    InconsistentData,

    #[error("no basis label carries Fisher information")]
    DegenerateInformation,

    #[error("commutator of {0} and {1} is not proportional to a single basis element")]
    NonPauliCommutator(String, String),

    #[error("unknown control setting code {0:?}")]
    UnknownSetting(String),

    #[error("unknown state catalog {0:?}")]
    UnknownCatalog(String),

    #[error("no tallies recorded for observable {0}")]
    MissingObservable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed record file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
