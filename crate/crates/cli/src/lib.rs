//! Library half of the `hdlab` binary: configuration, artifact writing,
//! experiment dispatch and plot-script emission.

pub mod config;
pub mod experiments;
pub mod output;
pub mod plots;

pub use config::{Command, ExperimentConfig, Potential, StencilChoice, OUTPUT_ENV};
pub use experiments::{run, RunOutcome};
pub use plots::emit_plots;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error(transparent)]
    Core(#[from] hdlab::Error),

    /// The run finished but its own check did not pass.
    #[error("accuracy check failed: {0}")]
    Accuracy(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const DEGENERATE: i32 = 3;
    pub const ACCURACY: i32 = 4;
    pub const INTERNAL: i32 = 5;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::MissingArtifact(_) => exit::CONFIG,
            CliError::Core(hdlab::Error::InvalidParameter(_)) => exit::CONFIG,
            CliError::Core(e) if e.is_degenerate() => exit::DEGENERATE,
            CliError::Core(e) if e.is_accuracy() => exit::ACCURACY,
            CliError::Accuracy(_) => exit::ACCURACY,
            CliError::Core(_) | CliError::Io(_) | CliError::Internal(_) => exit::INTERNAL,
        }
    }
}
