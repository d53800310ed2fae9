//! The wrapper feature-selection problem.
//!
//! A genome selects a subset of the dataset's columns. Its objective vector
//! is `(k-NN classification error, selected / total features)`. During
//! optimization the error is measured on the training split only, with each
//! training row classified by its nearest *other* training rows; the test
//! split is touched only when a final front is re-evaluated.

mod dataset;
mod knn;

pub use dataset::{load_csv, make_synthetic, split, Dataset, SplitSpec, SyntheticData, SyntheticSpec};
pub use knn::{knn_classify, FsProblem};
