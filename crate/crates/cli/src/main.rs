use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cnsga_cli::config::{AlgorithmChoice, DatasetSource, ExperimentConfig};
use cnsga_cli::{run_experiment, stepsize_sweep, AggregateReport, HarnessError};
use cnsga_core::objectives::SyntheticSpec;

/// Multi-objective wrapper feature selection with compact NSGA-II and NSGA-II.
#[derive(Parser)]
#[command(name = "cnsga", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated hold-out experiment with one or both algorithms.
    Run(Options),
    /// CNSGA-II experiments across several step sizes.
    Sweep {
        /// Comma-separated step sizes, e.g. `0.02,0.002,0.001`.
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<f64>,
        #[command(flatten)]
        options: Options,
    },
}

/// Flags override values from `--config`.
#[derive(Args)]
struct Options {
    /// TOML or JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV dataset: numeric features, last column integer class label.
    #[arg(long, conflicts_with = "synthetic")]
    dataset: Option<PathBuf>,
    /// Min-max scale CSV features to [0, 1].
    #[arg(long, requires = "dataset")]
    scale: bool,
    /// Planted-relevance synthetic data: `d,relevant,classes,per_class`.
    #[arg(long, value_delimiter = ',', value_name = "D,RELEVANT,CLASSES,PER_CLASS")]
    synthetic: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmChoice>,
    #[arg(long)]
    runs: Option<usize>,
    /// Evaluation budget per run.
    #[arg(long)]
    nfc: Option<usize>,
    /// k-NN neighbour count (required unless set in the config file).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Base seed; run r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    /// CNSGA-II PV step size (1 / virtual population size).
    #[arg(long)]
    step_size: Option<f64>,
    #[arg(long)]
    num_pvs: Option<usize>,
    #[arg(long)]
    min_boundary: Option<f64>,
    #[arg(long)]
    max_pop_size: Option<usize>,
    /// NSGA-II population size.
    #[arg(long)]
    pop_size: Option<usize>,
    /// Concurrent runs.
    #[arg(long)]
    workers: Option<usize>,
    /// Let training rows match themselves instead of leave-one-out.
    #[arg(long)]
    self_match: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Options {
    fn resolve(self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(path) = self.dataset {
            cfg.dataset = DatasetSource::Csv { path, scale: self.scale };
        }
        if let Some(parts) = self.synthetic {
            if parts.len() != 4 {
                return Err(HarnessError::Config(format!(
                    "--synthetic takes d,relevant,classes,per_class; got {} value(s)",
                    parts.len()
                )));
            }
            let base = match cfg.dataset {
                DatasetSource::Synthetic(spec) => spec,
                DatasetSource::Csv { .. } => SyntheticSpec::default(),
            };
            cfg.dataset = DatasetSource::Synthetic(SyntheticSpec {
                d: parts[0],
                relevant: parts[1],
                classes: parts[2],
                per_class: parts[3],
                ..base
            });
        }
        macro_rules! set {
            ($flag:expr => $($field:tt)+) => {
                if let Some(v) = $flag {
                    cfg.$($field)+ = v;
                }
            };
        }
        set!(self.algorithm => algorithm);
        set!(self.runs => runs);
        set!(self.nfc => nfc);
        set!(self.k.map(Some) => knn_k);
        set!(self.test_fraction => test_fraction);
        set!(self.seed => base_seed);
        set!(self.step_size => cnsga.step_size);
        set!(self.num_pvs => cnsga.num_pvs);
        set!(self.min_boundary => cnsga.min_boundary);
        set!(self.max_pop_size => cnsga.max_pop_size);
        set!(self.pop_size => nsga2.pop_size);
        set!(self.workers => workers);
        set!(self.out => out);
        if self.self_match {
            cfg.leave_one_out = false;
        }
        Ok(cfg)
    }
}

fn print_report(report: &AggregateReport) {
    println!(
        "{:<8} {:>5} {:>17} {:>17} {:>17} {:>17} {:>17}",
        "alg", "runs", "train HV", "test HV", "initial HV", "min train err", "feature ratio"
    );
    for s in &report.algorithms {
        let cell = |m: cnsga_cli::MeanStd| format!("{:.4}±{:.4}", m.mean, m.std);
        println!(
            "{:<8} {:>5} {:>17} {:>17} {:>17} {:>17} {:>17}",
            s.algorithm.name(),
            s.runs,
            cell(s.final_train_hv),
            cell(s.final_test_hv),
            cell(s.initial_test_hv),
            cell(s.min_train_error),
            cell(s.mean_feature_ratio)
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(options) => options.resolve().and_then(|cfg| {
            let outcome = run_experiment(&cfg)?;
            print_report(&outcome.report);
            println!("wrote {}", outcome.aggregate_path.display());
            Ok(())
        }),
        Command::Sweep { steps, options } => options.resolve().and_then(|cfg| {
            let outcome = stepsize_sweep(&cfg, &steps)?;
            for (step, experiment) in outcome.steps.iter().zip(&outcome.experiments) {
                println!("step size {step}");
                print_report(&experiment.report);
            }
            println!("wrote {}", cfg.out.join("sweep.json").display());
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
