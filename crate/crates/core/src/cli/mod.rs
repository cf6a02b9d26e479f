//! Command line front end: job documents, commands and reports.

pub mod commands;
pub mod job;
pub mod report;
pub mod suite;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad input: malformed job, unknown field, failed precondition.
    #[error("invalid job: {0}")]
    Validation(String),
    #[error("computation failed: {0}")]
    Engine(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Engine(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
