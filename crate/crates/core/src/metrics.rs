//! ROC curve construction and area-under-curve computation.
//!
//! Two routes to the same number: [`auc_trapezoid`] integrates the ROC
//! curve, and [`auc_pairwise`] counts concordant positive/negative score
//! pairs (the Mann-Whitney form, ties worth one half). The half-tie
//! convention is what makes the two routes agree exactly, and both are
//! invariant under strictly increasing transformations of the scores.

use crate::data::Label;
use crate::error::{Error, Result};

/// Prediction scores paired with their true labels.
#[derive(Debug, Clone)]
pub struct ScoredLabels {
    scores: Vec<f64>,
    labels: Vec<Label>,
}

impl ScoredLabels {
    /// Validates equal lengths and the presence of both classes
    /// (the AUC is undefined otherwise).
    pub fn new(scores: Vec<f64>, labels: Vec<Label>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: scores.len(),
            });
        }
        let n_plus = labels.iter().filter(|l| l.is_positive()).count();
        let n_minus = labels.len() - n_plus;
        if n_plus == 0 || n_minus == 0 {
            return Err(Error::SingleClass { n_plus, n_minus });
        }
        Ok(ScoredLabels { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
}

/// One operating point of a ROC curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve swept from threshold +inf down through each distinct score.
///
/// The curve starts at (0,0) and ends at (1,1); all rows sharing a score
/// collapse into a single point, so ties appear as diagonal segments.
pub fn roc_curve(data: &ScoredLabels) -> Vec<RocPoint> {
    let n_plus = data.labels.iter().filter(|l| l.is_positive()).count();
    let n_minus = data.labels.len() - n_plus;

    let mut order: Vec<usize> = (0..data.scores.len()).collect();
    order.sort_by(|&a, &b| data.scores[b].total_cmp(&data.scores[a]));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = data.scores[order[i]];
        // Consume the whole tie group at this threshold.
        while i < order.len() && data.scores[order[i]] == threshold {
            match data.labels[order[i]] {
                Label::Positive => tp += 1,
                Label::Negative => fp += 1,
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_minus as f64,
            tpr: tp as f64 / n_plus as f64,
        });
    }
    points
}

/// Trapezoidal area under a ROC curve.
pub fn auc_trapezoid(curve: &[RocPoint]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Pairwise (Mann-Whitney) AUC: the fraction of (positive, negative)
/// pairs where the positive outscores the negative, ties counting 0.5.
///
/// Computed in O(n log n) via the rank-sum identity with average ranks
/// over tie groups.
pub fn auc_pairwise(data: &ScoredLabels) -> f64 {
    auc_ranked(&data.scores, &data.labels)
}

/// Rank-sum AUC over raw slices. Callers guarantee both classes present
/// and equal lengths.
pub(crate) fn auc_ranked(scores: &[f64], labels: &[Label]) -> f64 {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut n_plus = 0usize;
    let mut rank_sum_plus = 0.0;
    let mut i = 0;
    while i < order.len() {
        let score = scores[order[i]];
        let start = i;
        let mut positives_in_group = 0usize;
        while i < order.len() && scores[order[i]] == score {
            if labels[order[i]].is_positive() {
                positives_in_group += 1;
            }
            i += 1;
        }
        // Average 1-based rank of the tie group [start, i).
        let avg_rank = (start + 1 + i) as f64 / 2.0;
        rank_sum_plus += avg_rank * positives_in_group as f64;
        n_plus += positives_in_group;
    }
    let n_minus = scores.len() - n_plus;
    let np = n_plus as f64;
    (rank_sum_plus - np * (np + 1.0) / 2.0) / (np * n_minus as f64)
}
