//! Binary multi-objective optimization for wrapper feature selection.
//!
//! Two optimizers share one set of multi-objective primitives:
//!
//! - [`cnsga`]: a compact NSGA-II. The population is represented by a small
//!   set of probability vectors, each pulled toward its nearest leader
//!   (by Hamming distance) and sampled once per iteration.
//! - [`nsga2`]: the classical binary NSGA-II baseline with binary tournament,
//!   single-point crossover and bit-flip mutation.
//!
//! Both minimize `(classification error, selected-feature ratio)` as computed
//! by [`objectives::FsProblem`], an exact k-NN wrapper over a train split.
//! Performance is measured with the exact two-objective hypervolume in
//! [`metrics`].

pub mod cnsga;
pub mod error;
pub mod metrics;
pub mod moo;
pub mod nsga2;
pub mod objectives;
pub mod problem;

pub use cnsga::{CnsgaConfig, CnsgaState, ProbabilityVector};
pub use error::{ConfigError, DataError, EvalError, RunError};
pub use metrics::{hypervolume_2d, HvTrajectory};
pub use moo::{
    crowding_distance, deduplicate, dominates, non_dominated_sort, select_best, Genome,
    Individual, ObjectiveVector, RankedPopulation,
};
pub use nsga2::Nsga2Config;
pub use objectives::{Dataset, FsProblem, SplitSpec};
pub use problem::{Algorithm, CountingProblem, Problem, RunRecord};

/// Deterministic RNG used by every seeded operation in the crate.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Builds the crate RNG from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
