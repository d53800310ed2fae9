//! Repeated hold-out experiments.
//!
//! Run `r` uses seed `base_seed + r` for both its train/test split and every
//! algorithm's RNG, so algorithms compared within one run index see the same
//! split. Runs execute on a pool of `workers` threads; results are gathered
//! in run order, so the emitted files do not depend on the worker count.

use std::path::{Path, PathBuf};

use cnsga_core::objectives::{load_csv, make_synthetic, split};
use cnsga_core::{
    cnsga, hypervolume_2d, nsga2, Algorithm, Dataset, FsProblem, HvTrajectory, Individual,
    ObjectiveVector, RunRecord, SplitSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{AlgorithmChoice, DatasetSource, ExperimentConfig};
use crate::report::{
    emit_aggregate, emit_front, emit_trajectory, ensure_dir, front_path, trajectory_path, AggregateFile,
    AggregateReport, FrontRow, MeanStd, RunSummary,
};
use crate::HarnessError;

/// Full in-memory result of one run of one algorithm.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub summary: RunSummary,
    pub record: RunRecord,
    pub front: Vec<FrontRow>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub report: AggregateReport,
    pub runs: Vec<RunResult>,
    pub aggregate_path: PathBuf,
}

impl ExperimentOutcome {
    pub fn runs_of(&self, algorithm: Algorithm) -> impl Iterator<Item = &RunResult> {
        self.runs.iter().filter(move |r| r.summary.algorithm == algorithm)
    }
}

pub fn load_dataset(source: &DatasetSource) -> Result<Dataset, HarnessError> {
    Ok(match source {
        DatasetSource::Csv { path, scale } => {
            let data = load_csv(path)?;
            if *scale {
                data.min_max_scaled()
            } else {
                data
            }
        }
        DatasetSource::Synthetic(spec) => make_synthetic(spec)?.dataset,
    })
}

fn test_objectives(problem: &FsProblem, members: &[Individual]) -> Result<Vec<ObjectiveVector>, HarnessError> {
    members
        .iter()
        .map(|m| problem.evaluate_test(&m.genome).map_err(HarnessError::from))
        .collect()
}

/// Builds the hold-out problem for one run.
pub fn build_problem(config: &ExperimentConfig, data: &Dataset, seed: u64) -> Result<FsProblem, HarnessError> {
    let (train, test) = split(data, &SplitSpec::new(config.test_fraction, seed))?;
    let problem = FsProblem::new(train, test, config.k()?)?;
    Ok(if config.leave_one_out {
        problem
    } else {
        problem.with_self_match()
    })
}

fn run_one(
    config: &ExperimentConfig,
    data: &Dataset,
    run: usize,
    seed: u64,
) -> Result<Vec<RunResult>, HarnessError> {
    let problem = build_problem(config, data, seed)?;
    let mut results = Vec::new();
    for algorithm in config.algorithm.algorithms() {
        let record = match algorithm {
            Algorithm::Cnsga2 => cnsga::run(&config.cnsga_config(), &problem, seed)?,
            Algorithm::Nsga2 => nsga2::run(&config.nsga2_config(), &problem, seed)?,
        };
        // Test rows are read only from here on.
        let test = test_objectives(&problem, &record.front)?;
        let front: Vec<FrontRow> = record
            .front
            .iter()
            .zip(&test)
            .map(|(m, t)| FrontRow {
                f1_train: m.objectives.error,
                f2: m.objectives.ratio,
                f1_test: t.error,
                genome: m.genome.to_string(),
            })
            .collect();
        let initial_test = test_objectives(&problem, &record.initial_front)?;
        let (final_train_hv, final_test_hv, min_train_error, mean_feature_ratio) =
            RunSummary::front_metrics(&front, &config.reference);
        let summary = RunSummary {
            run,
            seed,
            algorithm,
            evals_used: record.evals_used,
            iterations: record.iterations,
            final_train_hv,
            final_test_hv,
            initial_test_hv: hypervolume_2d(&initial_test, &config.reference),
            min_train_error,
            mean_feature_ratio,
        };
        results.push(RunResult { summary, record, front });
    }
    Ok(results)
}

fn emit_run(dir: &Path, result: &RunResult) -> Result<(), HarnessError> {
    let s = &result.summary;
    emit_trajectory(&trajectory_path(dir, s.run, s.algorithm), &result.record.trajectory)?;
    emit_front(&front_path(dir, s.run, s.algorithm), &result.front)
}

/// Runs every configured algorithm `runs` times and writes all artifacts to
/// `config.out`. Runs that finish are written even if a later one fails.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    config.validate()?;
    let data = load_dataset(&config.dataset)?;
    let dir = config.out.as_path();
    ensure_dir(dir)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    let seeds = config.seeds();
    let outcomes: Vec<Result<Vec<RunResult>, HarnessError>> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(run, &seed)| {
                let results = run_one(config, &data, run, seed)?;
                for result in &results {
                    emit_run(dir, result)?;
                }
                Ok(results)
            })
            .collect()
    });

    let mut runs = Vec::new();
    let mut completed = Vec::new();
    let mut failures = Vec::new();
    for (run, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(results) => {
                completed.push(run);
                runs.extend(results);
            }
            Err(e) => failures.push((run, e.to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(HarnessError::Partial { completed, failures });
    }

    let summaries: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    let report = AggregateReport::from_runs(&config.algorithm.algorithms(), &summaries);
    let aggregate_path = emit_aggregate(
        dir,
        &AggregateFile {
            config: config.clone(),
            seeds,
            runs: summaries,
            report: report.clone(),
        },
    )?;
    Ok(ExperimentOutcome {
        report,
        runs,
        aggregate_path,
    })
}

/// One CNSGA-II experiment per step size.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub steps: Vec<f64>,
    pub experiments: Vec<ExperimentOutcome>,
    /// `stepsize_<i>_hv.csv`, one per step.
    pub trajectory_files: Vec<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct SweepIndex {
    steps: Vec<SweepEntry>,
}

#[derive(Serialize, Deserialize)]
struct SweepEntry {
    step_size: f64,
    directory: String,
    trajectory: String,
    final_train_hv: MeanStd,
}

/// Mean HV across runs at each evaluation count.
pub fn mean_trajectory<'a>(trajectories: impl IntoIterator<Item = &'a HvTrajectory>) -> HvTrajectory {
    let all: Vec<&HvTrajectory> = trajectories.into_iter().collect();
    let len = all.iter().map(|t| t.len()).min().unwrap_or(0);
    let points = (0..len)
        .map(|i| {
            let evals = all[0].points[i].0;
            let mean = all.iter().map(|t| t.points[i].1).sum::<f64>() / all.len() as f64;
            (evals, mean)
        })
        .collect();
    HvTrajectory { points }
}

/// Runs a CNSGA-II experiment for each step size into `out/step_<i>/` and
/// writes the run-averaged trajectories to `out/stepsize_<i>_hv.csv`, a
/// side-by-side `out/stepsize_hv.csv` and an index `out/sweep.json`.
pub fn stepsize_sweep(config: &ExperimentConfig, steps: &[f64]) -> Result<SweepOutcome, HarnessError> {
    if steps.is_empty() {
        return Err(HarnessError::Config("step-size sweep needs at least one step".into()));
    }
    let root = config.out.clone();
    ensure_dir(&root)?;
    let mut experiments = Vec::with_capacity(steps.len());
    let mut trajectory_files = Vec::with_capacity(steps.len());
    let mut means = Vec::with_capacity(steps.len());
    let mut entries = Vec::with_capacity(steps.len());
    for (i, &step) in steps.iter().enumerate() {
        let mut cfg = config.clone();
        cfg.algorithm = AlgorithmChoice::Cnsga2;
        cfg.cnsga.step_size = step;
        cfg.out = root.join(format!("step_{i}"));
        let outcome = run_experiment(&cfg)?;
        let mean = mean_trajectory(outcome.runs.iter().map(|r| &r.record.trajectory));
        let file = root.join(format!("stepsize_{i}_hv.csv"));
        emit_trajectory(&file, &mean)?;
        entries.push(SweepEntry {
            step_size: step,
            directory: format!("step_{i}"),
            trajectory: format!("stepsize_{i}_hv.csv"),
            final_train_hv: outcome
                .report
                .get(Algorithm::Cnsga2)
                .expect("cnsga2 was run")
                .final_train_hv,
        });
        trajectory_files.push(file);
        means.push(mean);
        experiments.push(outcome);
    }

    let mut side_by_side = String::from("evals");
    for i in 0..steps.len() {
        side_by_side.push_str(&format!(",step_{i}"));
    }
    side_by_side.push('\n');
    let rows = means.iter().map(HvTrajectory::len).min().unwrap_or(0);
    for row in 0..rows {
        side_by_side.push_str(&means[0].points[row].0.to_string());
        for mean in &means {
            side_by_side.push_str(&format!(",{}", mean.points[row].1));
        }
        side_by_side.push('\n');
    }
    let path = root.join("stepsize_hv.csv");
    std::fs::write(&path, side_by_side).map_err(|source| HarnessError::Io { path, source })?;

    let index = serde_json::to_string_pretty(&SweepIndex { steps: entries }).expect("index serializes");
    let path = root.join("sweep.json");
    std::fs::write(&path, index + "\n").map_err(|source| HarnessError::Io { path, source })?;

    Ok(SweepOutcome {
        steps: steps.to_vec(),
        experiments,
        trajectory_files,
    })
}

