use std::path::PathBuf;

use thiserror::Error;

/// Exit status for validation failures (bad config, missing or malformed inputs).
pub const EXIT_VALIDATION: u8 = 1;
/// Exit status for failures while running a valid experiment.
pub const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        source: xner_core::Error,
    },
    #[error("model file {}: {message}", path.display())]
    Model { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] xner_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_)
            | CliError::Read { .. }
            | CliError::Input { .. }
            | CliError::Model { .. } => EXIT_VALIDATION,
            CliError::Write { .. } | CliError::Core(_) => EXIT_RUNTIME,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
