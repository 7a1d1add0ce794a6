use std::fmt;

use graphnim::strategy::StrategyError;
use graphnim::{CubeError, LoadError};

/// Process exit codes. Stable contract for scripts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 2,
    Environment = 3,
    Aborted = 4,
    Failed = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Usage,
            message: message.into(),
        }
    }

    pub fn environment(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Environment,
            message: message.into(),
        }
    }

    pub fn aborted(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Aborted,
            message: message.into(),
        }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Failed,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        self.kind as u8
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::environment(e.to_string())
    }
}

impl From<CubeError> for CliError {
    fn from(e: CubeError) -> Self {
        match e {
            CubeError::TooLarge { .. } | CubeError::SymmetryTooLarge { .. } => {
                CliError::environment(e.to_string())
            }
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::SolverAborted(_) => CliError::aborted(e.to_string()),
            StrategyError::NoCompliantMove { .. } => CliError::failed(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}
