use std::fmt;

use crate::ingest::IngestError;

/// Failure of a CLI command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad or unreadable input data (exit code 2).
    Input(String),
    /// Invalid flags or parameter values (exit code 3).
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<longrun_core::Error> for CliError {
    fn from(e: longrun_core::Error) -> Self {
        use longrun_core::Error::*;
        match e {
            TooFewPoints(_) | NonFiniteValue(_) | ZeroResidual(_) | EmptyAfterDrop
            | EmptySequence | LengthMismatch => CliError::Input(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
