//! Multi-objective primitives shared by both optimizers: genomes, objective
//! vectors, Pareto dominance, non-dominated sorting, crowding distance,
//! best-first selection and genotypic duplicate elimination.
//!
//! Both objectives are minimized.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Fixed-length feature mask; bit `k` set means feature `k` is selected.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Genome(Vec<bool>);

impl Genome {
    pub fn new(bits: Vec<bool>) -> Self {
        Genome(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Genome(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Genome(vec![true; len])
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Genome)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, value: bool) {
        self.0[k] = value;
    }

    pub fn flip(&mut self, k: usize) {
        self.0[k] = !self.0[k];
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Indices of the selected features, ascending.
    pub fn selected(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| b.then_some(k))
            .collect()
    }

    pub fn complement(&self) -> Genome {
        Genome(self.0.iter().map(|b| !b).collect())
    }

    /// Number of positions where the two genomes differ.
    ///
    /// Panics if the lengths differ.
    pub fn hamming(&self, other: &Genome) -> usize {
        assert_eq!(
            self.len(),
            other.len(),
            "hamming distance between genomes of different length"
        );
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome({self})")
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &Genome, b: &Genome) -> usize {
    a.hamming(b)
}

/// `(classification error, selected-feature ratio)`, both in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub error: f64,
    pub ratio: f64,
}

impl ObjectiveVector {
    pub const fn new(error: f64, ratio: f64) -> Self {
        ObjectiveVector { error, ratio }
    }

    /// Objective `m` (0 = error, 1 = ratio).
    pub fn get(&self, m: usize) -> f64 {
        match m {
            0 => self.error,
            1 => self.ratio,
            _ => panic!("objective index {m} out of range"),
        }
    }
}

pub const NUM_OBJECTIVES: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Genome,
    pub objectives: ObjectiveVector,
}

impl Individual {
    pub fn new(genome: Genome, objectives: ObjectiveVector) -> Self {
        Individual { genome, objectives }
    }
}

/// Pareto dominance under minimization: `a` is no worse in every objective
/// and strictly better in at least one.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    a.error <= b.error && a.ratio <= b.ratio && (a.error < b.error || a.ratio < b.ratio)
}

/// A population annotated with non-domination rank and crowding distance.
///
/// `rank[i]` and `crowding[i]` belong to `members[i]`; crowding is computed
/// within each rank.
#[derive(Clone, Debug, Default)]
pub struct RankedPopulation {
    pub members: Vec<Individual>,
    pub rank: Vec<usize>,
    pub crowding: Vec<f64>,
}

impl RankedPopulation {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member indices grouped by rank, each group in insertion order.
    pub fn fronts(&self) -> Vec<Vec<usize>> {
        let depth = self.rank.iter().max().map_or(0, |r| r + 1);
        let mut fronts = vec![Vec::new(); depth];
        for (i, &r) in self.rank.iter().enumerate() {
            fronts[r].push(i);
        }
        fronts
    }

    /// The rank-0 members, in insertion order.
    pub fn first_front(&self) -> Vec<Individual> {
        self.members
            .iter()
            .zip(&self.rank)
            .filter(|(_, &r)| r == 0)
            .map(|(m, _)| m.clone())
            .collect()
    }

    /// Compares members by (rank asc, crowding desc, index asc).
    pub fn compare(&self, a: usize, b: usize) -> Ordering {
        self.rank[a]
            .cmp(&self.rank[b])
            .then_with(|| self.crowding[b].total_cmp(&self.crowding[a]))
            .then_with(|| a.cmp(&b))
    }

    /// All member indices, best first.
    pub fn best_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.compare(a, b));
        order
    }
}

/// Ranks `pop` into successive non-dominated fronts and computes crowding
/// distance within each front.
///
/// Uses the domination-count bookkeeping of fast non-dominated sorting,
/// `O(M n^2)` comparisons.
pub fn non_dominated_sort(pop: Vec<Individual>) -> RankedPopulation {
    let n = pop.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];

    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&pop[i].objectives, &pop[j].objectives);
            if dominates(a, b) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(b, a) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut rank = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    let mut level = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = level;
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        level += 1;
    }

    let mut ranked = RankedPopulation {
        members: pop,
        rank,
        crowding: vec![0.0; n],
    };
    for front in ranked.fronts() {
        let objs: Vec<ObjectiveVector> =
            front.iter().map(|&i| ranked.members[i].objectives).collect();
        for (&i, c) in front.iter().zip(crowding_distance(&objs)) {
            ranked.crowding[i] = c;
        }
    }
    ranked
}

/// Crowding distance of each member of a single front.
///
/// For every objective the front is sorted (stably) by that objective; the
/// first and last members get `+inf` and interior members accumulate the
/// normalized gap between their two neighbours. An objective whose range is
/// zero contributes nothing. Fronts of one or two members are all boundary.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..NUM_OBJECTIVES {
        order.sort_by(|&a, &b| front[a].get(m).total_cmp(&front[b].get(m)).then(a.cmp(&b)));
        let lo = front[order[0]].get(m);
        let hi = front[order[n - 1]].get(m);
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in order.windows(3) {
            let gap = front[w[2]].get(m) - front[w[0]].get(m);
            distance[w[1]] += gap / span;
        }
    }
    distance
}

/// The `n` best members by (rank asc, crowding desc, insertion index asc).
pub fn select_best(pop: &RankedPopulation, n: usize) -> Vec<Individual> {
    pop.best_order()
        .into_iter()
        .take(n)
        .map(|i| pop.members[i].clone())
        .collect()
}

/// Drops exact genome repeats, keeping the first occurrence.
pub fn deduplicate(pop: Vec<Individual>) -> Vec<Individual> {
    let mut seen = HashSet::with_capacity(pop.len());
    pop.into_iter()
        .filter(|ind| seen.insert(ind.genome.clone()))
        .collect()
}
