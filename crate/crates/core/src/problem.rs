use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::metrics::HvTrajectory;
use crate::moo::{Genome, Individual, ObjectiveVector};

/// A bi-objective minimization problem over fixed-length bit strings.
pub trait Problem: Sync {
    fn dimension(&self) -> usize;

    fn evaluate(&self, genome: &Genome) -> Result<ObjectiveVector, EvalError>;
}

impl<P: Problem + ?Sized> Problem for &P {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn evaluate(&self, genome: &Genome) -> Result<ObjectiveVector, EvalError> {
        (**self).evaluate(genome)
    }
}

/// Evaluates a batch of genomes, possibly in parallel. Output order matches
/// input order.
pub fn evaluate_all<P: Problem + ?Sized>(
    problem: &P,
    genomes: Vec<Genome>,
) -> Result<Vec<Individual>, EvalError> {
    let d = problem.dimension();
    genomes
        .into_par_iter()
        .map(|genome| {
            if genome.len() != d {
                return Err(EvalError::DimensionMismatch {
                    expected: d,
                    got: genome.len(),
                });
            }
            let objectives = problem.evaluate(&genome)?;
            Ok(Individual::new(genome, objectives))
        })
        .collect()
}

/// Wraps a problem and counts every call to `evaluate`.
pub struct CountingProblem<P> {
    inner: P,
    calls: AtomicUsize,
}

impl<P> CountingProblem<P> {
    pub fn new(inner: P) -> Self {
        CountingProblem {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Problem> Problem for CountingProblem<P> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn evaluate(&self, genome: &Genome) -> Result<ObjectiveVector, EvalError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(genome)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Cnsga2,
    Nsga2,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cnsga2 => "cnsga2",
            Algorithm::Nsga2 => "nsga2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one seeded optimizer run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Train-set HV after every iteration (generation).
    pub trajectory: HvTrajectory,
    /// Rank-0 set of the final population.
    pub front: Vec<Individual>,
    /// Rank-0 set of the random initial population.
    pub initial_front: Vec<Individual>,
    pub evals_used: usize,
    pub iterations: usize,
}
