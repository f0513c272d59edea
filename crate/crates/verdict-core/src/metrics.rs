//! Confusion-matrix statistics, precision/recall/F1, accuracy and AUROC.
//!
//! Fake is the positive class throughout. AUROC uses the rank (Mann-Whitney)
//! formulation with 0.5 credit per tie, which equals the probability that a
//! random positive scores above a random negative. Zero-denominator
//! conventions: precision is 0 when nothing was predicted positive, recall is
//! 0 when there are no positives, and F1 is 0 when both components are 0, so
//! degenerate predictors score 0 instead of erroring inside evaluation loops.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Label};
use crate::model::{decide, DecisionConfig, ModelError, TextPredictor};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("prediction and truth lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("labels are empty")]
    Empty,
    #[error("AUROC undefined: need at least one positive and one negative sample")]
    SingleClass,
    #[error(transparent)]
    Predict(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }
}

/// Count the confusion matrix with Fake=1 as the positive class.
pub fn confusion(pred: &[Label], truth: &[Label]) -> Result<ConfusionCounts, MetricsError> {
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut c = ConfusionCounts {
        true_pos: 0,
        false_pos: 0,
        false_neg: 0,
        true_neg: 0,
    };
    for (p, t) in pred.iter().zip(truth) {
        match (p, t) {
            (Label::Fake, Label::Fake) => c.true_pos += 1,
            (Label::Fake, Label::Real) => c.false_pos += 1,
            (Label::Real, Label::Fake) => c.false_neg += 1,
            (Label::Real, Label::Real) => c.true_neg += 1,
        }
    }
    Ok(c)
}

pub fn precision(c: &ConfusionCounts) -> f64 {
    let denom = c.true_pos + c.false_pos;
    if denom == 0 {
        0.0
    } else {
        c.true_pos as f64 / denom as f64
    }
}

pub fn recall(c: &ConfusionCounts) -> f64 {
    let denom = c.true_pos + c.false_neg;
    if denom == 0 {
        0.0
    } else {
        c.true_pos as f64 / denom as f64
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn f1(c: &ConfusionCounts) -> f64 {
    f1_score(precision(c), recall(c))
}

pub fn accuracy(c: &ConfusionCounts) -> f64 {
    (c.true_pos + c.true_neg) as f64 / c.total() as f64
}

/// Rank-based AUROC: `(U_pos) / (n_pos * n_neg)` where ties contribute half.
///
/// Sorting plus average ranks makes this O(n log n); the O(n^2) pairwise
/// count used as a test oracle agrees to 1e-12.
pub fn auroc(scores: &[f64], labels: &[Label]) -> Result<f64, MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch(scores.len(), labels.len()));
    }
    let n_pos = labels.iter().filter(|l| **l == Label::Fake).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|a, b| scores[*a].total_cmp(&scores[*b]));

    // Average ranks over tie groups (1-based ranks).
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == Label::Fake {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }

    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Flat evaluation record shared with the CLI report emitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub auroc: f64,
    pub counts: ConfusionCounts,
    pub n_samples: usize,
}

/// Score a dataset with a predictor, threshold at `tau`, and populate every
/// metric.
pub fn evaluate<P: TextPredictor + ?Sized>(
    predictor: &P,
    docs: &[Document],
    tau: f64,
) -> Result<MetricsReport, MetricsError> {
    let texts: Vec<String> = docs.iter().map(|d| d.clean_text.clone()).collect();
    let scores = predictor.predict_fake(&texts)?;
    let truth: Vec<Label> = docs.iter().map(|d| d.label).collect();
    let dc = DecisionConfig { tau };
    let pred: Vec<Label> = scores.iter().map(|p| decide(*p, &dc)).collect();
    let counts = confusion(&pred, &truth)?;
    Ok(MetricsReport {
        precision: precision(&counts),
        recall: recall(&counts),
        f1: f1(&counts),
        accuracy: accuracy(&counts),
        auroc: auroc(&scores, &truth)?,
        counts,
        n_samples: docs.len(),
    })
}
