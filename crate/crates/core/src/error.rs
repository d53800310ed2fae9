use std::path::PathBuf;

use thiserror::Error;

/// Failure while computing an objective vector.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("genome has {got} bits but the problem has {expected} features")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("objective evaluation failed: {0}")]
    Failed(String),
}

/// Rejected algorithm or experiment configuration.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("number of probability vectors must be at least 1")]
    NoProbabilityVectors,
    #[error("step size must be finite and non-negative, got {0}")]
    InvalidStepSize(f64),
    #[error("min boundary must lie in [0, 0.5), got {0}")]
    InvalidMinBoundary(f64),
    #[error("max population size {max_pop_size} is smaller than the number of probability vectors {num_pvs}")]
    MaxPopTooSmall { max_pop_size: usize, num_pvs: usize },
    #[error("evaluation budget {budget} cannot cover the initial population of {needed}")]
    BudgetTooSmall { budget: usize, needed: usize },
    #[error("population size must be even and at least 2, got {0}")]
    InvalidPopSize(usize),
    #[error("{name} must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("problem dimension must be at least 1")]
    EmptyProblem,
    #[error("{0}")]
    Invalid(String),
}

/// Dataset loading, generation and splitting errors.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: csv error: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("row {row}: expected {expected} columns, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    NonNumeric {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("row {row}: class label {value:?} is not a non-negative integer")]
    BadLabel { row: usize, value: String },
    #[error("dataset must contain at least two classes, found {0}")]
    SingleClass(usize),
    #[error("dataset is empty or has no feature columns")]
    Empty,
    #[error("split would leave an empty side ({train} train, {test} test)")]
    DegenerateSplit { train: usize, test: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Failure of a whole optimizer run.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
