//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A file parsed but its contents violate the expected format.
    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("unknown learner id `{0}`")]
    UnknownLearner(String),

    #[error("unknown hyperparameter `{key}` for learner `{id}`")]
    UnknownHyperparameter { id: String, key: String },

    #[error("learner `{id}` failed: {message}")]
    LearnerFailed { id: String, message: String },

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("{0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the CLI: 1 usage error, 2 data error, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArg(_)
            | Error::UnknownLearner(_)
            | Error::UnknownHyperparameter { .. } => 1,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::InvalidDataset(_)
            | Error::SchemaMismatch(_)
            | Error::DegenerateSplit(_) => 2,
            Error::LearnerFailed { .. } | Error::Internal(_) => 3,
        }
    }
}
