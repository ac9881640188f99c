//! Command-line plumbing for the gantry scheduling GAs: configuration
//! loading, the `run`/`sweep`/`qubits` commands and their output files.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_qubits, cmd_run, cmd_sweep, RunOptions, RunReport, SweepOptions, SweepReport};
pub use config::RunConfig;

/// Exit code 2 for configuration problems, 3 for failures during a run.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

/// Engine errors surface while validating inputs.
impl From<gantry_ga::Error> for CliError {
    fn from(e: gantry_ga::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
