use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid pair-partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configured resource budget was exceeded; the computation did not
    /// produce an answer.
    #[error("resource limit exceeded in {stage}: {detail}")]
    ResourceLimit { stage: String, detail: String },

    /// Two independent computations of the same quantity disagreed.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn budget(stage: &str, detail: impl Into<String>) -> Self {
        Error::ResourceLimit {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}
