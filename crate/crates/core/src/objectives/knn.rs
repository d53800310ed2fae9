use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::dataset::Dataset;
use crate::error::{ConfigError, EvalError};
use crate::moo::{Genome, ObjectiveVector};
use crate::problem::Problem;

/// Largest `pairs x features` table cached for leave-one-out evaluation
/// (128 MiB of `f64`).
const PAIR_CACHE_LIMIT: usize = 1 << 24;

fn squared_distance(a: &[f64], b: &[f64], selected: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &f in selected {
        let diff = a[f] - b[f];
        acc += diff * diff;
    }
    acc
}

/// Majority vote over `neighbors`, given as `(distance, row)` nearest first.
/// Count ties go to the class with the smaller summed distance, then to the
/// lower label.
fn vote(neighbors: &[(f64, usize)], labels: &[usize]) -> usize {
    let mut tally: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for &(dist, row) in neighbors {
        let entry = tally.entry(labels[row]).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += dist;
    }
    tally
        .into_iter()
        .min_by(|(la, (ca, sa)), (lb, (cb, sb))| {
            cb.cmp(ca).then(sa.total_cmp(sb)).then(la.cmp(lb))
        })
        .map(|(label, _)| label)
        .expect("at least one neighbour")
}

/// Keeps the `k` smallest `(distance, row)` pairs, sorted.
fn nearest(mut candidates: Vec<(f64, usize)>, k: usize) -> Vec<(f64, usize)> {
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, cmp);
        candidates.truncate(k);
    }
    candidates.sort_by(cmp);
    candidates
}

/// Classifies `query` by the `k` nearest rows of `train` under Euclidean
/// distance restricted to the genome's selected features.
///
/// Distance ties go to the lower row index. `exclude` removes one training
/// row from consideration (leave-one-out).
///
/// Panics if no feature is selected or fewer than `k` rows are eligible.
pub fn knn_classify(
    query: &[f64],
    train: &Dataset,
    genome: &Genome,
    k: usize,
    exclude: Option<usize>,
) -> usize {
    let selected = genome.selected();
    assert!(!selected.is_empty(), "k-NN needs at least one selected feature");
    let candidates: Vec<(f64, usize)> = (0..train.len())
        .filter(|&i| Some(i) != exclude)
        .map(|i| (squared_distance(query, train.row(i), &selected).sqrt(), i))
        .collect();
    assert!(k >= 1 && candidates.len() >= k, "not enough neighbours for k = {k}");
    vote(&nearest(candidates, k), train.labels())
}

/// Wrapper feature-selection problem: `(k-NN error, feature ratio)`.
#[derive(Debug)]
pub struct FsProblem {
    train: Dataset,
    test: Dataset,
    k: usize,
    leave_one_out: bool,
    /// Feature-major squared differences over training pairs `i < j`.
    pair_cache: Option<Vec<f64>>,
    test_reads: AtomicUsize,
}

impl FsProblem {
    pub fn new(train: Dataset, test: Dataset, k: usize) -> Result<Self, ConfigError> {
        if k == 0 || k >= train.len() {
            return Err(ConfigError::Invalid(format!(
                "k must satisfy 1 <= k < {} (training rows), got {k}",
                train.len()
            )));
        }
        if train.num_features() != test.num_features() {
            return Err(ConfigError::Invalid("train and test feature counts differ".into()));
        }
        let n = train.len();
        let d = train.num_features();
        let pairs = n * (n - 1) / 2;
        let pair_cache = (pairs.saturating_mul(d) <= PAIR_CACHE_LIMIT).then(|| {
            let mut cache = Vec::with_capacity(pairs * d);
            for f in 0..d {
                for i in 0..n {
                    let xi = train.row(i)[f];
                    for j in (i + 1)..n {
                        let diff = xi - train.row(j)[f];
                        cache.push(diff * diff);
                    }
                }
            }
            cache
        });
        Ok(FsProblem {
            train,
            test,
            k,
            leave_one_out: true,
            pair_cache,
            test_reads: AtomicUsize::new(0),
        })
    }

    /// Classify each training row against all training rows, itself
    /// included, instead of leave-one-out.
    pub fn with_self_match(mut self) -> Self {
        self.leave_one_out = false;
        self
    }

    pub fn train(&self) -> &Dataset {
        &self.train
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of calls that have read the test split.
    pub fn test_reads(&self) -> usize {
        self.test_reads.load(Ordering::SeqCst)
    }

    fn ratio(&self, genome: &Genome) -> f64 {
        genome.count_ones() as f64 / genome.len() as f64
    }

    fn check_len(&self, genome: &Genome) -> Result<(), EvalError> {
        if genome.len() != self.train.num_features() {
            return Err(EvalError::DimensionMismatch {
                expected: self.train.num_features(),
                got: genome.len(),
            });
        }
        Ok(())
    }

    /// Training-phase objectives. Every training row is classified by its
    /// `k` nearest other training rows.
    pub fn evaluate_train(&self, genome: &Genome) -> Result<ObjectiveVector, EvalError> {
        self.check_len(genome)?;
        let ratio = self.ratio(genome);
        let selected = genome.selected();
        if selected.is_empty() {
            return Ok(ObjectiveVector::new(1.0, ratio));
        }
        let n = self.train.len();
        let pair_dist = self.pair_distances(&selected);
        let pair_index = |i: usize, j: usize| {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            a * (2 * n - a - 1) / 2 + (b - a - 1)
        };

        let mut wrong = 0usize;
        for i in 0..n {
            let candidates: Vec<(f64, usize)> = (0..n)
                .filter_map(|j| {
                    if j == i {
                        (!self.leave_one_out).then_some((0.0, j))
                    } else {
                        Some((pair_dist[pair_index(i, j)], j))
                    }
                })
                .collect();
            if vote(&nearest(candidates, self.k), self.train.labels()) != self.train.label(i) {
                wrong += 1;
            }
        }
        Ok(ObjectiveVector::new(wrong as f64 / n as f64, ratio))
    }

    /// Euclidean distance for every training pair `i < j`.
    fn pair_distances(&self, selected: &[usize]) -> Vec<f64> {
        let n = self.train.len();
        let pairs = n * (n - 1) / 2;
        let mut acc = vec![0.0; pairs];
        match &self.pair_cache {
            Some(cache) => {
                for &f in selected {
                    let column = &cache[f * pairs..(f + 1) * pairs];
                    for (a, &c) in acc.iter_mut().zip(column) {
                        *a += c;
                    }
                }
            }
            None => {
                let mut p = 0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        acc[p] = squared_distance(self.train.row(i), self.train.row(j), selected);
                        p += 1;
                    }
                }
            }
        }
        acc.iter_mut().for_each(|v| *v = v.sqrt());
        acc
    }

    /// Final objectives on the held-out split: every test row is classified
    /// against all training rows.
    pub fn evaluate_test(&self, genome: &Genome) -> Result<ObjectiveVector, EvalError> {
        self.check_len(genome)?;
        self.test_reads.fetch_add(1, Ordering::SeqCst);
        let ratio = self.ratio(genome);
        if genome.count_ones() == 0 {
            return Ok(ObjectiveVector::new(1.0, ratio));
        }
        let wrong = (0..self.test.len())
            .filter(|&i| knn_classify(self.test.row(i), &self.train, genome, self.k, None) != self.test.label(i))
            .count();
        Ok(ObjectiveVector::new(wrong as f64 / self.test.len() as f64, ratio))
    }
}

impl Problem for FsProblem {
    fn dimension(&self) -> usize {
        self.train.num_features()
    }

    fn evaluate(&self, genome: &Genome) -> Result<ObjectiveVector, EvalError> {
        self.evaluate_train(genome)
    }
}
