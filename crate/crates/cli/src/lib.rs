//! Batch driver for thin-layer convergence studies: builds expansions, measures their
//! remainders against the exact disk solutions over a grid of layer widths and fits
//! log–log convergence slopes.

pub mod config;
pub mod parse;
pub mod report;
pub mod study;

pub use config::{Problem, StudyConfig};
pub use report::{ConvergeReport, ExpandReport, OracleReport, ResidualReport, SlopeFit, StudyRow};
pub use study::{run_converge, run_expand, run_oracle, run_residual, RESIDUAL_LIMIT};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: thinlayer_core::Error,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn core(context: impl Into<String>, source: thinlayer_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }
}

/// Worker pool capped by `THINLAYER_THREADS` when it holds a positive integer.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("THINLAYER_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}
