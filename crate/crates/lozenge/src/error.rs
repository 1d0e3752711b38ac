use std::fmt;
use std::io;

/// Everything the front end can fail with, each with a stable code and exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input: bad JSON, bad grid spec, schema violation.
    Config {
        code: &'static str,
        message: String,
    },
    Domain(lozenge_core::Error),
    /// A `verify` check exceeded its tolerance.
    Verification(String),
    Io {
        path: String,
        source: io::Error,
    },
}

impl CliError {
    pub fn config(code: &'static str, message: impl Into<String>) -> Self {
        CliError::Config { code, message: message.into() }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config { code, .. } => code,
            CliError::Domain(e) => e.code(),
            CliError::Verification(_) => "verification_failed",
            CliError::Io { .. } => "io",
        }
    }

    /// 1 for verification failures, 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::Domain(e) if e.is_config() => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { message, .. } => write!(f, "{message}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Verification(m) => write!(f, "{m}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<lozenge_core::Error> for CliError {
    fn from(e: lozenge_core::Error) -> Self {
        CliError::Domain(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
