use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed signature `{text}`: {reason}")]
    Signature { text: String, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("evaluation budget exceeded: {0}")]
    Budget(String),

    #[error("no contraction plan with intermediate order <= {cap} for `{signature}`")]
    NoPlan { cap: usize, signature: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("integer overflow while evaluating `{0}`")]
    Overflow(String),

    #[error("dataset record `{id}`: {reason}")]
    Dataset { id: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors the CLI reports as validation/resource failures (exit code 2).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
