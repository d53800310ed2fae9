//! Compact NSGA-II.
//!
//! Instead of a parent population the optimizer keeps `N` probability
//! vectors (PVs), one selection probability per feature. Every iteration:
//!
//! 1. each PV is paired with the nearest still-unassigned leader (Hamming
//!    distance between the leader and the PV thresholded at 0.5) and nudged
//!    toward it by `step_size` per bit, then clipped to
//!    `[min_boundary, 1 - min_boundary]`;
//! 2. one genome is sampled from each PV and evaluated;
//! 3. the archive is re-ranked, the `N` best members become the next leaders
//!    and everything that is neither a leader nor on the first front is
//!    dropped, capped at `max_pop_size`.
//!
//! Between iterations the archive holds `max(N, |front|)` individuals, and at
//! most `N` more while new samples are being ranked.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, RunError};
use crate::metrics::{HvTrajectory, DEFAULT_REFERENCE};
use crate::moo::{deduplicate, non_dominated_sort, Genome, Individual, ObjectiveVector};
use crate::problem::{evaluate_all, Algorithm, Problem, RunRecord};
use crate::{rng_from_seed, SeededRng};

/// Per-feature selection probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Self {
        ProbabilityVector(probs)
    }

    /// All probabilities at 0.5.
    pub fn uniform(d: usize) -> Self {
        ProbabilityVector(vec![0.5; d])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// Bit `k` is set iff `probs[k] > 0.5`; exactly 0.5 maps to 0.
    pub fn binarize(&self) -> Genome {
        Genome::new(self.0.iter().map(|&p| p > 0.5).collect())
    }

    /// Draws `u_k` uniform in `[0, 1)` per feature; bit `k` is set iff
    /// `u_k < probs[k]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Genome {
        Genome::new(self.0.iter().map(|&p| rng.gen::<f64>() < p).collect())
    }

    /// Moves every element `step_size` toward the leader's bit and clips to
    /// `[min_boundary, 1 - min_boundary]`.
    pub fn update(&mut self, leader: &Genome, step_size: f64, min_boundary: f64) {
        assert_eq!(self.len(), leader.len(), "leader and PV lengths differ");
        let (lo, hi) = (min_boundary, 1.0 - min_boundary);
        for (p, &bit) in self.0.iter_mut().zip(leader.bits()) {
            let moved = if bit { *p + step_size } else { *p - step_size };
            *p = moved.clamp(lo, hi);
        }
    }
}

/// Returns a copy of `pv` updated toward `leader`.
pub fn update_pv(pv: &ProbabilityVector, leader: &Genome, config: &CnsgaConfig) -> ProbabilityVector {
    let mut next = pv.clone();
    next.update(leader, config.step_size, config.min_boundary);
    next
}

/// Greedily pairs PVs with leaders.
///
/// PVs are visited in index order; each takes the unassigned leader nearest
/// (Hamming) to its binarized form, lowest leader index on ties. Returns
/// `assignment[pv] = leader`, a permutation of `0..N`.
///
/// Panics if the counts differ.
pub fn assign_leaders(pvs: &[ProbabilityVector], leaders: &[Genome]) -> Vec<usize> {
    assert_eq!(
        pvs.len(),
        leaders.len(),
        "leader assignment needs one leader per probability vector"
    );
    let n = pvs.len();
    let binary: Vec<Genome> = pvs.iter().map(ProbabilityVector::binarize).collect();
    let distance: Vec<Vec<usize>> = binary
        .iter()
        .map(|b| leaders.iter().map(|l| l.hamming(b)).collect())
        .collect();

    let mut taken = vec![false; n];
    let mut assignment = Vec::with_capacity(n);
    for row in &distance {
        let (best, _) = row
            .iter()
            .enumerate()
            .filter(|&(k, _)| !taken[k])
            .min_by_key(|&(k, &dist)| (dist, k))
            .expect("a leader remains for every PV");
        taken[best] = true;
        assignment.push(best);
    }
    assignment
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CnsgaConfig {
    /// Number of probability vectors `N`.
    pub num_pvs: usize,
    /// PV increment per update; the reciprocal of the virtual population size.
    pub step_size: f64,
    pub min_boundary: f64,
    /// Archive cap; also the maximum size of the reported front.
    pub max_pop_size: usize,
    /// Objective evaluations available, including the initial population.
    pub nfc_budget: usize,
    /// Optional iteration cap applied in addition to the budget.
    pub max_iterations: Option<usize>,
    pub reference: ObjectiveVector,
}

impl Default for CnsgaConfig {
    fn default() -> Self {
        CnsgaConfig {
            num_pvs: 10,
            step_size: 1.0 / 500.0,
            min_boundary: 0.01,
            max_pop_size: 100,
            nfc_budget: 10_000,
            max_iterations: None,
            reference: DEFAULT_REFERENCE,
        }
    }
}

impl CnsgaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_pvs == 0 {
            return Err(ConfigError::NoProbabilityVectors);
        }
        if !(self.step_size.is_finite() && self.step_size >= 0.0) {
            return Err(ConfigError::InvalidStepSize(self.step_size));
        }
        if !(0.0..0.5).contains(&self.min_boundary) {
            return Err(ConfigError::InvalidMinBoundary(self.min_boundary));
        }
        if self.max_pop_size < self.num_pvs {
            return Err(ConfigError::MaxPopTooSmall {
                max_pop_size: self.max_pop_size,
                num_pvs: self.num_pvs,
            });
        }
        if self.nfc_budget < self.num_pvs {
            return Err(ConfigError::BudgetTooSmall {
                budget: self.nfc_budget,
                needed: self.num_pvs,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CnsgaState {
    pub pvs: Vec<ProbabilityVector>,
    /// Archive kept between iterations.
    pub population: Vec<Individual>,
    pub leaders: Vec<Individual>,
    /// Rank-0 members of the archive.
    pub pareto_front: Vec<Individual>,
    pub evals_used: usize,
    pub iterations: usize,
    /// Largest number of individuals held at once during the last iteration.
    pub peak_stored: usize,
}

impl CnsgaState {
    pub fn front_objectives(&self) -> Vec<ObjectiveVector> {
        self.pareto_front.iter().map(|m| m.objectives).collect()
    }
}

/// Uniform PVs plus a random, evaluated population of `N` genomes.
pub fn init<P: Problem + ?Sized>(
    config: &CnsgaConfig,
    problem: &P,
    rng: &mut SeededRng,
) -> Result<CnsgaState, RunError> {
    config.validate()?;
    let d = problem.dimension();
    if d == 0 {
        return Err(ConfigError::EmptyProblem.into());
    }
    let n = config.num_pvs;
    let pvs = vec![ProbabilityVector::uniform(d); n];
    let genomes: Vec<Genome> = (0..n).map(|_| pvs[0].sample(rng)).collect();
    let population = evaluate_all(problem, genomes)?;
    let pareto_front = non_dominated_sort(population.clone()).first_front();
    Ok(CnsgaState {
        pvs,
        leaders: population.clone(),
        peak_stored: population.len(),
        population,
        pareto_front,
        evals_used: n,
        iterations: 0,
    })
}

/// One PV-update / sample / select cycle.
pub fn iterate<P: Problem + ?Sized>(
    state: &mut CnsgaState,
    config: &CnsgaConfig,
    problem: &P,
    rng: &mut SeededRng,
) -> Result<(), RunError> {
    let n = config.num_pvs;

    // The archive can hold fewer than N distinct genomes on tiny problems;
    // reuse leaders cyclically so every PV still gets one.
    let leader_genomes: Vec<Genome> = (0..n)
        .map(|j| state.leaders[j % state.leaders.len()].genome.clone())
        .collect();
    let assignment = assign_leaders(&state.pvs, &leader_genomes);
    for (pv, &leader) in state.pvs.iter_mut().zip(&assignment) {
        pv.update(&leader_genomes[leader], config.step_size, config.min_boundary);
    }

    let samples: Vec<Genome> = state.pvs.iter().map(|pv| pv.sample(rng)).collect();
    let offspring = evaluate_all(problem, samples)?;
    state.evals_used += n;

    let mut population = std::mem::take(&mut state.population);
    population.extend(offspring);
    state.peak_stored = population.len();
    let ranked = non_dominated_sort(deduplicate(population));

    // Best-first order puts every rank-0 member ahead of the rest, so
    // "front plus leaders" is a prefix of it.
    let order = ranked.best_order();
    state.leaders = order.iter().take(n).map(|&i| ranked.members[i].clone()).collect();
    let mut archive: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|&(pos, &i)| pos < n || ranked.rank[i] == 0)
        .map(|(_, &i)| i)
        .collect();
    archive.truncate(config.max_pop_size);

    state.pareto_front = archive
        .iter()
        .filter(|&&i| ranked.rank[i] == 0)
        .map(|&i| ranked.members[i].clone())
        .collect();
    state.population = archive.iter().map(|&i| ranked.members[i].clone()).collect();
    state.iterations += 1;
    Ok(())
}

fn should_continue(state: &CnsgaState, config: &CnsgaConfig) -> bool {
    state.evals_used + config.num_pvs <= config.nfc_budget
        && config.max_iterations.is_none_or(|cap| state.iterations < cap)
}

/// Runs to budget exhaustion, recording train HV after every iteration.
pub fn run<P: Problem + ?Sized>(
    config: &CnsgaConfig,
    problem: &P,
    seed: u64,
) -> Result<RunRecord, RunError> {
    run_observed(config, problem, seed, |_| {})
}

/// Like [`run`], calling `observe` with the state after initialization and
/// after every iteration.
pub fn run_observed<P, F>(
    config: &CnsgaConfig,
    problem: &P,
    seed: u64,
    mut observe: F,
) -> Result<RunRecord, RunError>
where
    P: Problem + ?Sized,
    F: FnMut(&CnsgaState),
{
    let mut rng = rng_from_seed(seed);
    let mut state = init(config, problem, &mut rng)?;
    observe(&state);
    let initial_front = state.pareto_front.clone();
    let mut trajectory = HvTrajectory::new();
    while should_continue(&state, config) {
        iterate(&mut state, config, problem, &mut rng)?;
        trajectory
            .record(state.evals_used, &state.front_objectives(), &config.reference)
            .expect("evaluations grow every iteration");
        observe(&state);
    }
    Ok(RunRecord {
        algorithm: Algorithm::Cnsga2,
        seed,
        trajectory,
        front: state.pareto_front,
        initial_front,
        evals_used: state.evals_used,
        iterations: state.iterations,
    })
}
