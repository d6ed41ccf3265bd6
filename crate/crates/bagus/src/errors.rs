//! Error classification for the stable exit-code contract:
//! 0 success, 2 usage/parse, 3 numerical failure.

use bagus_core::Error as CoreError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files: exit 2.
    Usage(String),
    /// The numerics failed (divergence, non-PD, all grid points failed): exit 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Divergence
            | CoreError::NotPositiveDefinite
            | CoreError::DegenerateDiagonal { .. }
            | CoreError::DegenerateSubproblem { .. }
            | CoreError::GenerationFailed { .. }
            | CoreError::InternalConsistency(_)
            | CoreError::TuningFailed { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
