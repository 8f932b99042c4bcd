use std::path::PathBuf;

use thiserror::Error;

/// Harness-level errors, mapped onto process exit codes:
/// 0 success, 2 config error, 3 data error, 4 numeric error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<nn_core::NnError> for CliError {
    fn from(e: nn_core::NnError) -> Self {
        match e {
            nn_core::NnError::TrainingDiverged { .. } => CliError::Numeric(e.to_string()),
            nn_core::NnError::InvalidConfig(_) => CliError::Config(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<stochastic_inference::InferenceError> for CliError {
    fn from(e: stochastic_inference::InferenceError) -> Self {
        match e {
            stochastic_inference::InferenceError::Numeric { .. } => {
                CliError::Numeric(e.to_string())
            }
            stochastic_inference::InferenceError::InvalidConfig(_)
            | stochastic_inference::InferenceError::BlockOutOfRange { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<attacks::AttackError> for CliError {
    fn from(e: attacks::AttackError) -> Self {
        match e {
            attacks::AttackError::InvalidConfig(_) => CliError::Config(e.to_string()),
            attacks::AttackError::NumericError => CliError::Numeric(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<uncertainty_metrics::MetricsError> for CliError {
    fn from(e: uncertainty_metrics::MetricsError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
