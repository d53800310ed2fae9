//! Binary NSGA-II baseline: binary tournament on (rank, crowding),
//! single-point crossover, bit-flip mutation and elitist (mu + lambda)
//! survival over the deduplicated union of parents and offspring.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, RunError};
use crate::metrics::{HvTrajectory, DEFAULT_REFERENCE};
use crate::moo::{deduplicate, non_dominated_sort, select_best, Genome, ObjectiveVector, RankedPopulation};
use crate::problem::{evaluate_all, Algorithm, Problem, RunRecord};
use crate::{rng_from_seed, SeededRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Nsga2Config {
    pub pop_size: usize,
    /// Objective evaluations available, including the initial population.
    pub nfc_budget: usize,
    pub crossover_prob: f64,
    /// Per-bit flip probability; `None` means `1 / dimension`.
    pub mutation_prob: Option<f64>,
    pub max_generations: Option<usize>,
    pub reference: ObjectiveVector,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Nsga2Config {
            pop_size: 100,
            nfc_budget: 10_000,
            crossover_prob: 1.0,
            mutation_prob: None,
            max_generations: None,
            reference: DEFAULT_REFERENCE,
        }
    }
}

impl Nsga2Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(ConfigError::InvalidPopSize(self.pop_size));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(ConfigError::InvalidProbability {
                name: "crossover_prob",
                value: self.crossover_prob,
            });
        }
        if let Some(p) = self.mutation_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::InvalidProbability {
                    name: "mutation_prob",
                    value: p,
                });
            }
        }
        if self.nfc_budget < self.pop_size {
            return Err(ConfigError::BudgetTooSmall {
                budget: self.nfc_budget,
                needed: self.pop_size,
            });
        }
        Ok(())
    }

    pub fn mutation_prob_for(&self, d: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / d as f64)
    }
}

/// Binary tournament between members `a` and `b`: lower rank wins, then
/// larger crowding, then a fair coin.
pub fn tournament<R: Rng + ?Sized>(pop: &RankedPopulation, a: usize, b: usize, rng: &mut R) -> usize {
    use std::cmp::Ordering::*;
    let by_rank = pop.rank[a].cmp(&pop.rank[b]);
    let by_crowding = pop.crowding[b].total_cmp(&pop.crowding[a]);
    match by_rank.then(by_crowding) {
        Less => a,
        Greater => b,
        Equal => {
            if rng.gen_bool(0.5) {
                a
            } else {
                b
            }
        }
    }
}

/// Single-point crossover at a uniform cut in `1..d`, applied with
/// probability `crossover_prob`; otherwise (or when `d < 2`) the parents are
/// copied through.
pub fn single_point_crossover<R: Rng + ?Sized>(
    p1: &Genome,
    p2: &Genome,
    crossover_prob: f64,
    rng: &mut R,
) -> (Genome, Genome) {
    assert_eq!(p1.len(), p2.len(), "crossover parents differ in length");
    let d = p1.len();
    if d < 2 || !rng.gen_bool(crossover_prob) {
        return (p1.clone(), p2.clone());
    }
    let cut = rng.gen_range(1..d);
    (splice(p1, p2, cut), splice(p2, p1, cut))
}

/// `head[..cut] ++ tail[cut..]`.
pub fn splice(head: &Genome, tail: &Genome, cut: usize) -> Genome {
    let mut bits = head.bits()[..cut].to_vec();
    bits.extend_from_slice(&tail.bits()[cut..]);
    Genome::new(bits)
}

/// Flips each bit independently with probability `mutation_prob`.
pub fn bitflip_mutation<R: Rng + ?Sized>(g: &Genome, mutation_prob: f64, rng: &mut R) -> Genome {
    let mut out = g.clone();
    for k in 0..out.len() {
        if rng.gen_bool(mutation_prob) {
            out.flip(k);
        }
    }
    out
}

fn random_genome(d: usize, rng: &mut SeededRng) -> Genome {
    Genome::new((0..d).map(|_| rng.gen::<f64>() < 0.5).collect())
}

fn make_offspring(
    parents: &RankedPopulation,
    count: usize,
    crossover_prob: f64,
    mutation_prob: f64,
    rng: &mut SeededRng,
) -> Vec<Genome> {
    let n = parents.len();
    let mut pool = Vec::with_capacity(count);
    while pool.len() < count {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        pool.push(tournament(parents, a, b, rng));
    }
    let mut offspring = Vec::with_capacity(count);
    for pair in pool.chunks(2) {
        let p1 = &parents.members[pair[0]].genome;
        let p2 = &parents.members[pair[pair.len() - 1]].genome;
        let (c1, c2) = single_point_crossover(p1, p2, crossover_prob, rng);
        offspring.push(bitflip_mutation(&c1, mutation_prob, rng));
        if offspring.len() < count {
            offspring.push(bitflip_mutation(&c2, mutation_prob, rng));
        }
    }
    offspring
}

pub fn run<P: Problem + ?Sized>(config: &Nsga2Config, problem: &P, seed: u64) -> Result<RunRecord, RunError> {
    run_observed(config, problem, seed, |_| {})
}

/// Runs generations until the next one would exceed the budget. `observe`
/// sees the surviving population after initialization and after every
/// generation.
pub fn run_observed<P, F>(
    config: &Nsga2Config,
    problem: &P,
    seed: u64,
    mut observe: F,
) -> Result<RunRecord, RunError>
where
    P: Problem + ?Sized,
    F: FnMut(&RankedPopulation),
{
    config.validate()?;
    let d = problem.dimension();
    if d == 0 {
        return Err(ConfigError::EmptyProblem.into());
    }
    let n = config.pop_size;
    let mutation_prob = config.mutation_prob_for(d);
    let mut rng = rng_from_seed(seed);

    let initial: Vec<Genome> = (0..n).map(|_| random_genome(d, &mut rng)).collect();
    let mut population = non_dominated_sort(evaluate_all(problem, initial)?);
    let mut evals_used = n;
    let initial_front = population.first_front();
    observe(&population);

    let mut trajectory = HvTrajectory::new();
    let mut generations = 0;
    while evals_used + n <= config.nfc_budget
        && config.max_generations.is_none_or(|cap| generations < cap)
    {
        let children = make_offspring(&population, n, config.crossover_prob, mutation_prob, &mut rng);
        let children = evaluate_all(problem, children)?;
        evals_used += n;

        let mut merged = population.members;
        merged.extend(children);
        let merged = non_dominated_sort(deduplicate(merged));
        population = non_dominated_sort(select_best(&merged, n));
        generations += 1;

        let front: Vec<ObjectiveVector> = population
            .members
            .iter()
            .zip(&population.rank)
            .filter(|(_, &r)| r == 0)
            .map(|(m, _)| m.objectives)
            .collect();
        trajectory
            .record(evals_used, &front, &config.reference)
            .expect("evaluations grow every generation");
        observe(&population);
    }

    Ok(RunRecord {
        algorithm: Algorithm::Nsga2,
        seed,
        trajectory,
        front: population.first_front(),
        initial_front,
        evals_used,
        iterations: generations,
    })
}
