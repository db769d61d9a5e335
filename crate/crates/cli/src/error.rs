use std::fmt;

use orbitk::OrbitError;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// A property check failed (PSD, residual over tolerance, ...).
    Finding = 1,
    /// The mathematical input is invalid.
    MathInput = 2,
    /// The configuration could not be read or does not match the schema.
    Config = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Math(OrbitError),
    Io(std::io::Error),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) | CliError::Io(_) => ExitStatus::Config,
            CliError::Math(OrbitError::NotPsd(_)) => ExitStatus::Finding,
            CliError::Math(_) => ExitStatus::MathInput,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Math(e) => write!(f, "invalid input: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        CliError::Math(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
