//! Experiment runner behind the `maruin` binary: config handling, the
//! subcommands, artifact writers and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::fmt;

/// Failure of a subcommand, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit 1).
    Config(String),
    /// A numerical step could not be certified (exit 2).
    Numeric(String),
    /// The acceptance suite failed (exit 3).
    Acceptance(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) | CliError::Io(_) => 2,
            CliError::Acceptance(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Acceptance(m) => write!(f, "acceptance failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Attach context to a library error.
pub(crate) fn numeric(ctx: &str) -> impl Fn(maruin::Error) -> CliError + '_ {
    move |e| CliError::Numeric(format!("{ctx}: {e}"))
}
