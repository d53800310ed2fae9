use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::rng_from_seed;

/// Dense numeric table with integer class labels in `0..num_classes`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    n: usize,
    d: usize,
    /// Row-major `n x d`.
    features: Vec<f64>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl Dataset {
    /// Builds a dataset from rows; `num_classes` is `max(label) + 1`.
    pub fn new(name: impl Into<String>, rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self, DataError> {
        let n = rows.len();
        if n == 0 || rows[0].is_empty() {
            return Err(DataError::Empty);
        }
        if labels.len() != n {
            return Err(DataError::Invalid(format!(
                "{} rows but {} labels",
                n,
                labels.len()
            )));
        }
        let d = rows[0].len();
        let mut features = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(DataError::Ragged {
                    row: i + 1,
                    expected: d,
                    found: row.len(),
                });
            }
            if let Some(column) = row.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NonNumeric {
                    row: i + 1,
                    column: column + 1,
                    value: row[column].to_string(),
                });
            }
            features.extend_from_slice(row);
        }
        let distinct: BTreeSet<usize> = labels.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(DataError::SingleClass(distinct.len()));
        }
        let num_classes = labels.iter().max().map_or(0, |m| m + 1);
        Ok(Dataset {
            name: name.into(),
            n,
            d,
            features,
            labels,
            num_classes,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn num_features(&self) -> usize {
        self.d
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Rows `indices`, in the given order, keeping the parent's class count.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            name: self.name.clone(),
            n: indices.len(),
            d: self.d,
            features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
        }
    }

    /// Rescales every column to `[0, 1]`; constant columns become 0.
    pub fn min_max_scaled(&self) -> Dataset {
        let mut out = self.clone();
        for f in 0..self.d {
            let column = (0..self.n).map(|i| self.features[i * self.d + f]);
            let (lo, hi) = column.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
            let span = hi - lo;
            for i in 0..self.n {
                let v = &mut out.features[i * self.d + f];
                *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
            }
        }
        out
    }
}

/// Hold-out split parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Self {
        SplitSpec { test_fraction, seed }
    }
}

/// Seeded random partition into `(train, test)`.
///
/// The test side receives `round(n * test_fraction)` rows drawn without
/// replacement; both sides keep their rows in original order.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), DataError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(DataError::Invalid(format!(
            "test fraction must lie in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    let n = data.len();
    if n < 5 {
        return Err(DataError::Invalid(format!("need at least 5 rows to split, got {n}")));
    }
    let n_test = (n as f64 * spec.test_fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(DataError::DegenerateSplit {
            train: n - n_test,
            test: n_test,
        });
    }
    let mut rng = rng_from_seed(spec.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut test: Vec<usize> = order[..n_test].to_vec();
    let mut train: Vec<usize> = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((data.subset(&train), data.subset(&test)))
}

/// Planted-relevance generator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub d: usize,
    pub relevant: usize,
    pub classes: usize,
    pub per_class: usize,
    /// Distance between consecutive class centres on every relevant feature.
    pub gap: f64,
    /// Irrelevant features are uniform in `[0, noise_amp)`.
    pub noise_amp: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            d: 500,
            relevant: 10,
            classes: 4,
            per_class: 25,
            gap: 1.0,
            noise_amp: 2.0,
            seed: 0,
        }
    }
}

/// Relevant-feature jitter as a fraction of `gap`. Below a quarter of the gap
/// every class is closer to itself than to any other class.
pub const JITTER_FRACTION: f64 = 0.2;

#[derive(Clone, Debug)]
pub struct SyntheticData {
    pub dataset: Dataset,
    /// Positions of the relevant features, ascending.
    pub relevant_features: Vec<usize>,
}

/// Generates `classes * per_class` rows. Class `c` has every relevant feature
/// at `c * gap` plus uniform jitter of `JITTER_FRACTION * gap`; irrelevant
/// features carry label-independent uniform noise. Relevant positions are
/// drawn at random.
pub fn make_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData, DataError> {
    if spec.relevant > spec.d || spec.d == 0 {
        return Err(DataError::Invalid(format!(
            "need 0 < d and relevant <= d, got d={} relevant={}",
            spec.d, spec.relevant
        )));
    }
    if !(spec.gap > 0.0) || !(spec.noise_amp >= 0.0) {
        return Err(DataError::Invalid("gap must be positive and noise_amp non-negative".into()));
    }
    if spec.classes < 2 || spec.per_class == 0 {
        return Err(DataError::Invalid("need at least 2 classes and 1 row per class".into()));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut positions: Vec<usize> = (0..spec.d).collect();
    positions.shuffle(&mut rng);
    let mut relevant_features = positions[..spec.relevant].to_vec();
    relevant_features.sort_unstable();
    let mut is_relevant = vec![false; spec.d];
    for &f in &relevant_features {
        is_relevant[f] = true;
    }

    let jitter = JITTER_FRACTION * spec.gap;
    let mut rows = Vec::with_capacity(spec.classes * spec.per_class);
    let mut labels = Vec::with_capacity(rows.capacity());
    for c in 0..spec.classes {
        let centre = c as f64 * spec.gap;
        for _ in 0..spec.per_class {
            let row = is_relevant
                .iter()
                .map(|&rel| {
                    if rel {
                        centre + rng.gen_range(-jitter..=jitter)
                    } else {
                        rng.gen::<f64>() * spec.noise_amp
                    }
                })
                .collect();
            rows.push(row);
            labels.push(c);
        }
    }
    let name = format!(
        "synthetic-d{}-r{}-c{}x{}",
        spec.d, spec.relevant, spec.classes, spec.per_class
    );
    Ok(SyntheticData {
        dataset: Dataset::new(name, rows, labels)?,
        relevant_features,
    })
}

/// Reads a comma-separated numeric table whose last column is an integer
/// class label. A first row containing any non-numeric cell is treated as a
/// header. Labels are remapped to `0..C` in ascending order of their values.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|source| DataError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if idx == 0 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(DataError::Ragged {
                row: line,
                expected,
                found: record.len(),
            });
        }
        if expected < 2 {
            return Err(DataError::Empty);
        }
        let mut row = Vec::with_capacity(expected - 1);
        for (column, cell) in record.iter().take(expected - 1).enumerate() {
            let value = cell.parse::<f64>().ok().filter(|v| v.is_finite());
            row.push(value.ok_or_else(|| DataError::NonNumeric {
                row: line,
                column: column + 1,
                value: cell.to_string(),
            })?);
        }
        let label_cell = &record[expected - 1];
        let label = parse_label(label_cell).ok_or_else(|| DataError::BadLabel {
            row: line,
            value: label_cell.to_string(),
        })?;
        rows.push(row);
        raw_labels.push(label);
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }

    let distinct: Vec<u64> = raw_labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let labels = raw_labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("label collected above"))
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(name, rows, labels)
}

fn parse_label(cell: &str) -> Option<u64> {
    if let Ok(v) = cell.parse::<u64>() {
        return Some(v);
    }
    let v = cell.parse::<f64>().ok()?;
    (v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64).then_some(v as u64)
}
