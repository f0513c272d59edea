//! Attribution agreement between two methods on the same instance.

use serde::{Deserialize, Serialize};

use super::{Attribution, ExplainError};

/// Agreement summary: top-k token-set overlap, sign agreement on the union of
/// the two top-k sets, and Spearman rank correlation of score magnitudes over
/// all tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionComparison {
    pub method_a: String,
    pub method_b: String,
    pub top_k: usize,
    pub jaccard: f64,
    pub sign_agreement: f64,
    pub rank_correlation: f64,
}

/// Compare two attributions over the identical token list.
pub fn compare_attributions(
    a: &Attribution,
    b: &Attribution,
    k: usize,
) -> Result<AttributionComparison, ExplainError> {
    if a.tokens != b.tokens {
        return Err(ExplainError::TokenMismatch);
    }
    let top_a = top_k_indices(&a.scores, k);
    let top_b = top_k_indices(&b.scores, k);

    let union: Vec<usize> = {
        let mut u: Vec<usize> = top_a.iter().chain(&top_b).copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    let intersection = top_a.iter().filter(|i| top_b.contains(i)).count();
    let jaccard = if union.is_empty() {
        1.0
    } else {
        intersection as f64 / union.len() as f64
    };

    let agreeing = union
        .iter()
        .filter(|i| sign_of(a.scores[**i]) == sign_of(b.scores[**i]))
        .count();
    let sign_agreement = if union.is_empty() {
        1.0
    } else {
        agreeing as f64 / union.len() as f64
    };

    let abs_a: Vec<f64> = a.scores.iter().map(|s| s.abs()).collect();
    let abs_b: Vec<f64> = b.scores.iter().map(|s| s.abs()).collect();
    let rank_correlation = spearman(&abs_a, &abs_b);

    Ok(AttributionComparison {
        method_a: a.method.label().to_string(),
        method_b: b.method.label().to_string(),
        top_k: k,
        jaccard,
        sign_agreement,
        rank_correlation,
    })
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Indices of the k largest magnitudes, ties broken by earlier index.
fn top_k_indices(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|a, b| {
        scores[*b]
            .abs()
            .total_cmp(&scores[*a].abs())
            .then(a.cmp(b))
    });
    order.truncate(k);
    order
}

/// Spearman correlation with average ranks for ties. When one side has zero
/// rank variance: 1.0 if both are constant, else 0.0.
fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - mean) * (y - mean);
        var_a += (x - mean) * (x - mean);
        var_b += (y - mean) * (y - mean);
    }
    if var_a == 0.0 || var_b == 0.0 {
        return if var_a == var_b { 1.0 } else { 0.0 };
    }
    cov / (var_a.sqrt() * var_b.sqrt())
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|x, y| values[*x].total_cmp(&values[*y]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}
