//! Command implementations behind the `infosearch` binary.

pub mod batch;
pub mod manifest;
pub mod plot;
pub mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use batch::{cmd_batch, parse_counts, parse_seeds, BatchRow, BatchSummary};
pub use run::{cmd_run, RunArtifacts, RunOptions};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "INFOSEARCH_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] infosearch::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for invalid configuration, 4 for unparseable files, 3 for anything
    /// that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(infosearch::Error::Config { .. }) | CliError::Usage(_) => 2,
            CliError::Core(infosearch::Error::Parse(_)) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
