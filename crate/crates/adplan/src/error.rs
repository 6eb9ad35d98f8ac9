use std::path::PathBuf;

use thiserror::Error;

/// Errors from loading inputs, running planners and writing results.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Parse { origin: String, line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: adplan_core::Error,
    },
    #[error("no usable graph after {attempts} attempts starting from seed {seed}")]
    GenerationFailed { seed: u64, attempts: u32 },
    #[error("writing {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("writing {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub(crate) fn model(context: impl Into<String>, source: adplan_core::Error) -> Self {
        HarnessError::Model { context: context.into(), source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Process exit status: 3 for search-space and generation failures,
    /// 2 for bad or unreadable inputs, 1 for output errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::GenerationFailed { .. } => 3,
            HarnessError::Model { source: adplan_core::Error::SearchSpaceTooLarge { .. }, .. } => 3,
            HarnessError::Unreadable { .. }
            | HarnessError::Parse { .. }
            | HarnessError::Scenario(_)
            | HarnessError::Model { .. } => 2,
            HarnessError::Io { .. } | HarnessError::Csv { .. } | HarnessError::Json { .. } => 1,
        }
    }
}
