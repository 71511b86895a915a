use std::path::PathBuf;

/// Errors raised while loading inputs or running the model.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse scenario: {0}")]
    Parse(String),

    #[error("invalid value for `{field}`: {reason}")]
    Invariant { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("candidate site set is empty: {0}")]
    EmptyCandidates(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("no feasible configuration was visited")]
    NoFeasible,

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invariant(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invariant {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
