//! Dataset representation, CSV ingestion, class weights, and stratified
//! holdout splitting.
//!
//! A [`Dataset`] is an immutable collection of labeled feature vectors
//! partitioned into a positive and a negative class. Both classes must be
//! non-empty: the class-weighted training objective divides by each class
//! count, so single-class data is unusable and is rejected at
//! construction time.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, shuffle};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// The label as the signed value used in margins: +1 or -1.
    pub fn signum(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Label::Positive)
    }
}

/// One training row: a dense feature vector and its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub features: Vec<f64>,
    pub label: Label,
}

impl LabeledPoint {
    pub fn new(features: Vec<f64>, label: Label) -> Self {
        LabeledPoint { features, label }
    }
}

/// Per-class loss multipliers: 1/(2·n₊) for positives, 1/(2·n₋) for
/// negatives, so each class contributes total probability mass 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassWeights {
    pub positive: f64,
    pub negative: f64,
}

impl ClassWeights {
    pub fn new(n_plus: usize, n_minus: usize) -> Result<Self> {
        if n_plus == 0 || n_minus == 0 {
            return Err(Error::SingleClass { n_plus, n_minus });
        }
        Ok(ClassWeights {
            positive: 1.0 / (2.0 * n_plus as f64),
            negative: 1.0 / (2.0 * n_minus as f64),
        })
    }

    /// Weight for a row of the given class.
    pub fn of(&self, label: Label) -> f64 {
        match label {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
        }
    }
}

/// An immutable labeled dataset with both classes present.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<LabeledPoint>,
    positive_indices: Vec<usize>,
    negative_indices: Vec<usize>,
    dim: usize,
}

impl Dataset {
    /// Build a dataset from rows, validating shape and class presence.
    pub fn from_points(points: Vec<LabeledPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let dim = points[0].features.len();
        if dim == 0 {
            return Err(Error::NoFeatures);
        }
        let mut positive_indices = Vec::new();
        let mut negative_indices = Vec::new();
        for (i, p) in points.iter().enumerate() {
            if p.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.features.len(),
                });
            }
            match p.label {
                Label::Positive => positive_indices.push(i),
                Label::Negative => negative_indices.push(i),
            }
        }
        if positive_indices.is_empty() || negative_indices.is_empty() {
            return Err(Error::SingleClass {
                n_plus: positive_indices.len(),
                n_minus: negative_indices.len(),
            });
        }
        Ok(Dataset {
            points,
            positive_indices,
            negative_indices,
            dim,
        })
    }

    /// Total row count m.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Feature dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_plus(&self) -> usize {
        self.positive_indices.len()
    }

    pub fn n_minus(&self) -> usize {
        self.negative_indices.len()
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &LabeledPoint {
        &self.points[index]
    }

    pub fn positive_indices(&self) -> &[usize] {
        &self.positive_indices
    }

    pub fn negative_indices(&self) -> &[usize] {
        &self.negative_indices
    }

    pub fn labels(&self) -> Vec<Label> {
        self.points.iter().map(|p| p.label).collect()
    }

    pub fn class_weights(&self) -> ClassWeights {
        // Both counts are positive by construction.
        ClassWeights::new(self.n_plus(), self.n_minus()).expect("dataset invariant")
    }

    /// Weight of one row of the given class: 1/(2·n₊) or 1/(2·n₋).
    pub fn class_weight(&self, label: Label) -> f64 {
        self.class_weights().of(label)
    }

    /// New dataset containing the given rows (cloned), in slice order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        Dataset::from_points(points)
    }
}

/// Load a labeled dataset from a comma-separated file with a header row.
///
/// Every column except `target_column` must parse as a finite real
/// number. Rows whose target cell equals `positive_label` exactly become
/// the positive class; all other rows become the negative class.
pub fn load_csv(path: &Path, target_column: &str, positive_label: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::MissingColumn(target_column.to_string()))?;

    let mut points = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let mut features = Vec::with_capacity(headers.len().saturating_sub(1));
        for (col_idx, cell) in record.iter().enumerate() {
            if col_idx == target_idx {
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| Error::InvalidFeature {
                row: row_idx,
                column: headers[col_idx].to_string(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::InvalidFeature {
                    row: row_idx,
                    column: headers[col_idx].to_string(),
                    value: cell.to_string(),
                });
            }
            features.push(value);
        }
        let label = if &record[target_idx] == positive_label {
            Label::Positive
        } else {
            Label::Negative
        };
        points.push(LabeledPoint::new(features, label));
    }
    Dataset::from_points(points)
}

/// Stratified train/test split.
///
/// Each class is shuffled and split independently so the train and test
/// class ratios match the full dataset to within one row. The per-class
/// train count is `round(train_fraction * n_c)` clamped so that both
/// partitions keep at least one row of the class. Deterministic per seed.
pub fn split_holdout(
    dataset: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut train_indices = Vec::new();
    let mut test_indices = Vec::new();
    for (name, class_indices) in [
        ("positive", dataset.positive_indices()),
        ("negative", dataset.negative_indices()),
    ] {
        let n_c = class_indices.len();
        if n_c < 2 {
            return Err(Error::ClassTooSmall {
                class: name,
                count: n_c,
                needed: 2,
            });
        }
        let mut shuffled = class_indices.to_vec();
        shuffle(&mut shuffled, &mut rng);
        let n_train = ((train_fraction * n_c as f64).round() as usize).clamp(1, n_c - 1);
        train_indices.extend_from_slice(&shuffled[..n_train]);
        test_indices.extend_from_slice(&shuffled[n_train..]);
    }
    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok((dataset.subset(&train_indices)?, dataset.subset(&test_indices)?))
}
