//! Command-line layer over `polymoment-core`: argument parsing, cached prime
//! tables, report serialization, and the end-to-end verification harness.

pub mod cache;
pub mod cli;
pub mod report;
pub mod runner;
pub mod verify;

use std::fmt;

/// CLI failure classes, mapped to process exit codes by `main`.
///
/// `Config` covers bad arguments and invalid moduli (exit 2). `Budget`
/// covers term-budget exhaustion and degenerate schedules (exit 3).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Budget(msg) => write!(f, "budget: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<polymoment_core::Error> for CliError {
    fn from(err: polymoment_core::Error) -> Self {
        if err.is_budget_or_degeneracy() {
            CliError::Budget(err.to_string())
        } else {
            CliError::Config(err.to_string())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
