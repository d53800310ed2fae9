use std::path::{Path, PathBuf};

use cnsga_core::metrics::DEFAULT_REFERENCE;
use cnsga_core::objectives::SyntheticSpec;
use cnsga_core::{Algorithm, CnsgaConfig, Nsga2Config, ObjectiveVector};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSource {
    /// Numeric CSV, last column the class label.
    Csv {
        path: PathBuf,
        /// Min-max scale every feature column to `[0, 1]` after loading.
        #[serde(default)]
        scale: bool,
    },
    Synthetic(SyntheticSpec),
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Synthetic(SyntheticSpec::default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    Nsga2,
    Cnsga2,
    Both,
}

impl AlgorithmChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::Nsga2 => vec![Algorithm::Nsga2],
            AlgorithmChoice::Cnsga2 => vec![Algorithm::Cnsga2],
            AlgorithmChoice::Both => vec![Algorithm::Cnsga2, Algorithm::Nsga2],
        }
    }
}

/// Everything needed to reproduce an experiment. Defaults follow the
/// reference parameter table: 10 runs, 10,000 evaluations, 20 % hold-out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub algorithm: AlgorithmChoice,
    pub runs: usize,
    /// Evaluation budget per run and algorithm; overrides the budgets inside
    /// `cnsga` and `nsga2`.
    pub nfc: usize,
    /// Neighbour count; must be given per dataset.
    pub knn_k: Option<usize>,
    pub test_fraction: f64,
    pub base_seed: u64,
    /// Leave-one-out k-NN during training; `false` lets rows match themselves.
    pub leave_one_out: bool,
    /// HV reference point; overrides the algorithm configs.
    pub reference: ObjectiveVector,
    pub cnsga: CnsgaConfig,
    pub nsga2: Nsga2Config,
    /// Concurrent runs.
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSource::default(),
            algorithm: AlgorithmChoice::Both,
            runs: 10,
            nfc: 10_000,
            knn_k: None,
            test_fraction: 0.2,
            base_seed: 0,
            leave_one_out: true,
            reference: DEFAULT_REFERENCE,
            cnsga: CnsgaConfig::default(),
            nsga2: Nsga2Config::default(),
            workers: 1,
            out: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    /// Reads a TOML or JSON config file (chosen by extension; anything other
    /// than `.json` is parsed as TOML).
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|message| HarnessError::Config(format!("{}: {message}", path.display())))
    }

    pub fn k(&self) -> Result<usize, HarnessError> {
        self.knn_k
            .ok_or_else(|| HarnessError::Config("the k-NN neighbour count (k) must be set".into()))
    }

    /// CNSGA-II parameters with the shared budget and reference applied.
    pub fn cnsga_config(&self) -> CnsgaConfig {
        CnsgaConfig {
            nfc_budget: self.nfc,
            reference: self.reference,
            ..self.cnsga.clone()
        }
    }

    pub fn nsga2_config(&self) -> Nsga2Config {
        Nsga2Config {
            nfc_budget: self.nfc,
            reference: self.reference,
            ..self.nsga2.clone()
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|r| self.base_seed + r).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        self.k()?;
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(HarnessError::Config(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.workers == 0 {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        for algorithm in self.algorithm.algorithms() {
            match algorithm {
                Algorithm::Cnsga2 => self.cnsga_config().validate()?,
                Algorithm::Nsga2 => self.nsga2_config().validate()?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_defaults() {
        let text = r#"
            algorithm = "cnsga2"
            runs = 3
            knn_k = 4
            [dataset]
            kind = "csv"
            path = "data/tox.csv"
            [cnsga]
            step_size = 0.02
        "#;
        let cfg: ExperimentConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.algorithm, AlgorithmChoice::Cnsga2);
        assert_eq!(cfg.runs, 3);
        assert_eq!(cfg.cnsga.step_size, 0.02);
        assert_eq!(cfg.cnsga.num_pvs, 10);
        assert_eq!(
            cfg.dataset,
            DatasetSource::Csv {
                path: "data/tox.csv".into(),
                scale: false
            }
        );
        assert_eq!(cfg.nfc, 10_000);
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_err(), "k is required");
        cfg.knn_k = Some(5);
        cfg.validate().unwrap();
        cfg.nfc = 50;
        assert!(cfg.validate().is_err(), "budget below NSGA-II population");
        cfg.algorithm = AlgorithmChoice::Cnsga2;
        cfg.validate().unwrap();
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn seeds_follow_base() {
        let cfg = ExperimentConfig {
            base_seed: 40,
            runs: 3,
            ..ExperimentConfig::default()
        };
        assert_eq!(cfg.seeds(), vec![40, 41, 42]);
    }
}
