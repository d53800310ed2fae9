//! Result aggregation and on-disk artifacts.
//!
//! Per run and algorithm:
//! - `run_<r>_<alg>_hv.csv`: `evals,hv` train HV after every iteration;
//! - `run_<r>_<alg>_front.csv`: `f1_train,f2,f1_test,genome` for the final front.
//!
//! Per experiment: `aggregate.json` with the config echo, seeds, per-run
//! summaries and the aggregate report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cnsga_core::{hypervolume_2d, Algorithm, HvTrajectory, ObjectiveVector};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::HarnessError;

/// One member of a final front with its test-set error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub f1_train: f64,
    pub f2: f64,
    pub f1_test: f64,
    pub genome: String,
}

/// Scalar outcomes of one run of one algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub evals_used: usize,
    pub iterations: usize,
    pub final_train_hv: f64,
    pub final_test_hv: f64,
    pub initial_test_hv: f64,
    pub min_train_error: f64,
    pub mean_feature_ratio: f64,
}

impl RunSummary {
    /// Derives the front-based metrics from the emitted front rows.
    pub fn front_metrics(rows: &[FrontRow], reference: &ObjectiveVector) -> (f64, f64, f64, f64) {
        let train: Vec<ObjectiveVector> =
            rows.iter().map(|r| ObjectiveVector::new(r.f1_train, r.f2)).collect();
        let test: Vec<ObjectiveVector> =
            rows.iter().map(|r| ObjectiveVector::new(r.f1_test, r.f2)).collect();
        let min_error = rows.iter().map(|r| r.f1_train).fold(f64::INFINITY, f64::min);
        let mean_ratio = rows.iter().map(|r| r.f2).sum::<f64>() / rows.len() as f64;
        (
            hypervolume_2d(&train, reference),
            hypervolume_2d(&test, reference),
            min_error,
            mean_ratio,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> MeanStd {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeanStd { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub final_train_hv: MeanStd,
    pub final_test_hv: MeanStd,
    pub initial_test_hv: MeanStd,
    pub min_train_error: MeanStd,
    pub mean_feature_ratio: MeanStd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub algorithms: Vec<AlgorithmSummary>,
}

impl AggregateReport {
    pub fn from_runs(algorithms: &[Algorithm], runs: &[RunSummary]) -> AggregateReport {
        let algorithms = algorithms
            .iter()
            .map(|&algorithm| {
                let mine: Vec<&RunSummary> = runs.iter().filter(|r| r.algorithm == algorithm).collect();
                let stat = |f: fn(&RunSummary) -> f64| {
                    MeanStd::of(&mine.iter().map(|r| f(r)).collect::<Vec<_>>())
                };
                AlgorithmSummary {
                    algorithm,
                    runs: mine.len(),
                    final_train_hv: stat(|r| r.final_train_hv),
                    final_test_hv: stat(|r| r.final_test_hv),
                    initial_test_hv: stat(|r| r.initial_test_hv),
                    min_train_error: stat(|r| r.min_train_error),
                    mean_feature_ratio: stat(|r| r.mean_feature_ratio),
                }
            })
            .collect();
        AggregateReport { algorithms }
    }

    pub fn get(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|s| s.algorithm == algorithm)
    }
}

/// Contents of `aggregate.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateFile {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunSummary>,
    pub report: AggregateReport,
}

pub const AGGREGATE_FILE: &str = "aggregate.json";

pub fn trajectory_path(dir: &Path, run: usize, algorithm: Algorithm) -> PathBuf {
    dir.join(format!("run_{run}_{algorithm}_hv.csv"))
}

pub fn front_path(dir: &Path, run: usize, algorithm: Algorithm) -> PathBuf {
    dir.join(format!("run_{run}_{algorithm}_front.csv"))
}

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes `evals,hv` with one row per recorded iteration.
pub fn emit_trajectory(path: &Path, trajectory: &HvTrajectory) -> Result<(), HarnessError> {
    let mut out = String::from("evals,hv\n");
    for (evals, hv) in &trajectory.points {
        writeln!(out, "{evals},{hv}").expect("writing to a String");
    }
    write(path, &out)
}

pub fn emit_front(path: &Path, rows: &[FrontRow]) -> Result<(), HarnessError> {
    let mut out = String::from("f1_train,f2,f1_test,genome\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.f1_train, r.f2, r.f1_test, r.genome).expect("writing to a String");
    }
    write(path, &out)
}

pub fn emit_aggregate(dir: &Path, aggregate: &AggregateFile) -> Result<PathBuf, HarnessError> {
    let path = dir.join(AGGREGATE_FILE);
    let mut text = serde_json::to_string_pretty(aggregate).expect("aggregate serializes");
    text.push('\n');
    write(&path, &text)?;
    Ok(path)
}

pub fn read_aggregate(path: &Path) -> Result<AggregateFile, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std() {
        let s = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
        assert_eq!(MeanStd::of(&[0.4]).std, 0.0);
    }

    #[test]
    fn trajectory_and_front_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut traj = HvTrajectory::new();
        let r = ObjectiveVector::new(1.0, 1.0);
        for i in 1..=999 {
            traj.record(10 + 10 * i, &[ObjectiveVector::new(0.5, 0.5)], &r).unwrap();
        }
        let p = dir.path().join("t.csv");
        emit_trajectory(&p, &traj).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 1000);
        assert_eq!(text.lines().next(), Some("evals,hv"));

        let rows: Vec<FrontRow> = (0..12)
            .map(|i| FrontRow {
                f1_train: i as f64 / 12.0,
                f2: 1.0 - i as f64 / 12.0,
                f1_test: 0.1,
                genome: "0101".into(),
            })
            .collect();
        let p = dir.path().join("f.csv");
        emit_front(&p, &rows).unwrap();
        let mut reader = csv::Reader::from_path(&p).unwrap();
        let parsed: Vec<FrontRow> = reader.deserialize().map(Result::unwrap).collect();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn emit_to_missing_dir_names_path() {
        let err = emit_front(Path::new("/nonexistent/dir/front.csv"), &[]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/front.csv"));
    }
}
