//! Library surface of the graphlid CLI: each subcommand is a function over
//! parsed options so integration tests can drive the exact command paths.

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod report;

use thiserror::Error;

/// CLI failure classes mapped to process exit codes: input problems exit
/// with 1, numerical failures (non-convergence, degenerate statistics) with 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<graphlid::graph::GraphError> for CliError {
    fn from(e: graphlid::graph::GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<graphlid::walks::WalkError> for CliError {
    fn from(e: graphlid::walks::WalkError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<graphlid::sgns::SgnsError> for CliError {
    fn from(e: graphlid::sgns::SgnsError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<graphlid::eval::EvalError> for CliError {
    fn from(e: graphlid::eval::EvalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<graphlid::centrality::CentralityError> for CliError {
    fn from(e: graphlid::centrality::CentralityError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<graphlid::stats::StatsError> for CliError {
    fn from(e: graphlid::stats::StatsError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
