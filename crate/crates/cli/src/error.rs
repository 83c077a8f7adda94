use std::fmt;
use std::process::ExitCode;

use freeconv::{RmtError, SeriesError, SolverError};

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn divergence(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    pub fn check_failed(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Validation(_) | SolverError::Unnormalized { .. } | SolverError::NotUpperHalfPlane(_) => {
                Self::usage(e.to_string())
            }
            _ => Self::divergence(e.to_string()),
        }
    }
}

impl From<RmtError> for CliError {
    fn from(e: RmtError) -> Self {
        match e {
            RmtError::Solver(s) => s.into(),
            other => Self::usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::usage(e.to_string())
    }
}
