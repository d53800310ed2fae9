//! Experiment harness for `cnsga-core`: seeded repeated hold-out runs of
//! CNSGA-II and NSGA-II under equal evaluation budgets, step-size sweeps,
//! and CSV/JSON result files.

use std::path::PathBuf;

use cnsga_core::{ConfigError, DataError, EvalError, RunError};
use thiserror::Error;

pub mod config;
pub mod harness;
pub mod report;

pub use config::{AlgorithmChoice, DatasetSource, ExperimentConfig};
pub use harness::{run_experiment, stepsize_sweep, ExperimentOutcome, RunResult, SweepOutcome};
pub use report::{AggregateFile, AggregateReport, AlgorithmSummary, FrontRow, MeanStd, RunSummary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Algorithm(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{} run(s) failed (completed runs {completed:?} kept on disk): {}", failures.len(), describe(failures))]
    Partial {
        completed: Vec<usize>,
        failures: Vec<(usize, String)>,
    },
}

fn describe(failures: &[(usize, String)]) -> String {
    failures
        .iter()
        .map(|(run, e)| format!("run {run}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<RunError> for HarnessError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => HarnessError::Algorithm(c),
            RunError::Eval(e) => HarnessError::Eval(e),
        }
    }
}
