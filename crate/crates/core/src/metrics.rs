//! Exact two-objective hypervolume and per-iteration HV trajectories.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moo::{dominates, ObjectiveVector};

/// Default reference point; both objectives are bounded by 1.
pub const DEFAULT_REFERENCE: ObjectiveVector = ObjectiveVector::new(1.0, 1.0);

/// Area dominated by `front` and bounded by `reference`.
///
/// Points that do not strictly improve on the reference in both objectives
/// contribute nothing. Dominated points and duplicates are ignored.
pub fn hypervolume_2d(front: &[ObjectiveVector], reference: &ObjectiveVector) -> f64 {
    let mut pts: Vec<ObjectiveVector> = front
        .iter()
        .copied()
        .filter(|p| p.error < reference.error && p.ratio < reference.ratio)
        .collect();
    pts.sort_by(|a, b| a.error.total_cmp(&b.error).then(a.ratio.total_cmp(&b.ratio)));

    // After sorting by error, a point survives iff its ratio is strictly
    // below every ratio seen so far.
    let mut staircase: Vec<ObjectiveVector> = Vec::with_capacity(pts.len());
    for p in pts {
        if staircase.last().is_none_or(|last| p.ratio < last.ratio) {
            staircase.push(p);
        }
    }
    debug_assert!(staircase
        .iter()
        .all(|p| !staircase.iter().any(|q| dominates(q, p))));

    let mut area = 0.0;
    for (i, p) in staircase.iter().enumerate() {
        let next_error = staircase.get(i + 1).map_or(reference.error, |q| q.error);
        area += (next_error - p.error) * (reference.ratio - p.ratio);
    }
    area
}

#[derive(Debug, Error, PartialEq)]
#[error("evaluation count {got} does not exceed the last recorded count {last}")]
pub struct NonMonotoneRecord {
    pub last: usize,
    pub got: usize,
}

/// Hypervolume after each iteration, keyed by evaluations consumed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HvTrajectory {
    pub points: Vec<(usize, f64)>,
}

impl HvTrajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last_hv(&self) -> Option<f64> {
        self.points.last().map(|&(_, hv)| hv)
    }

    /// HV of the latest record at or before `evals`.
    pub fn hv_at(&self, evals: usize) -> Option<f64> {
        self.points
            .iter()
            .take_while(|&&(e, _)| e <= evals)
            .last()
            .map(|&(_, hv)| hv)
    }

    /// Appends `(evals_used, HV(front))`; `evals_used` must strictly increase.
    pub fn record(
        &mut self,
        evals_used: usize,
        front: &[ObjectiveVector],
        reference: &ObjectiveVector,
    ) -> Result<f64, NonMonotoneRecord> {
        if let Some(&(last, _)) = self.points.last() {
            if evals_used <= last {
                return Err(NonMonotoneRecord {
                    last,
                    got: evals_used,
                });
            }
        }
        let hv = hypervolume_2d(front, reference);
        self.points.push((evals_used, hv));
        Ok(hv)
    }
}
