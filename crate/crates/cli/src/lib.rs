//! Command-line driver: Monte Carlo curves, the exact circle oracle,
//! convergence tables and a self-test, written as CSV or JSON with gnuplot
//! scripts.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 usage or configuration
//! error, 3 resource limit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
pub mod output;
pub mod run;
pub mod selftest;

use betti_core::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    ResourceLimit(String),
    SelftestFailed(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelftestFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::ResourceLimit(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::ResourceLimit(m) => write!(f, "resource limit: {m}"),
            CliError::SelftestFailed(m) => write!(f, "selftest failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit { .. } => CliError::ResourceLimit(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}
