//! LIME: a weighted ridge surrogate over token-deletion perturbations.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::masking::{mask_to_text, MaskMode};
use super::{Attribution, AttributionMeta, ExplainError, Method};
use crate::model::TextPredictor;

#[derive(Debug, Clone, PartialEq)]
pub struct LimeConfig {
    /// Total perturbations, including the unperturbed instance.
    pub n_samples: usize,
    /// Scale of the exponential kernel over cosine distance to the full mask.
    pub kernel_width: f64,
    pub ridge_lambda: f64,
    /// Keep only the top-k coefficients by magnitude (others zeroed);
    /// `None` keeps all.
    pub top_k: Option<usize>,
    pub seed: u64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        LimeConfig {
            n_samples: 512,
            kernel_width: 0.75,
            ridge_lambda: 1.0,
            top_k: None,
            seed: 0,
        }
    }
}

/// Explain one instance.
///
/// Draws `n_samples` masks: the all-ones mask first, then Bernoulli(0.5) per
/// bit. All-zero draws are rejected and redrawn so the predictor always sees
/// at least one token. Each mask is weighted by `exp(-d^2 / width^2)` with
/// `d` the cosine distance to the all-ones mask, then a weighted ridge
/// regression of p(fake) on the mask bits yields the coefficients.
pub fn lime_explain<P: TextPredictor + ?Sized>(
    predictor: &P,
    text: &str,
    cfg: &LimeConfig,
) -> Result<Attribution, ExplainError> {
    let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    let m = tokens.len();
    if m == 0 {
        return Err(ExplainError::NoTokens);
    }
    if cfg.n_samples < m + 1 {
        return Err(ExplainError::TooFewSamples {
            needed: m + 1,
            got: cfg.n_samples,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(cfg.n_samples);
    masks.push(vec![true; m]);
    while masks.len() < cfg.n_samples {
        let mask: Vec<bool> = (0..m).map(|_| rng.random::<f64>() < 0.5).collect();
        if mask.iter().any(|b| *b) {
            masks.push(mask);
        }
    }
    if masks.iter().all(|mask| mask == &masks[0]) {
        return Err(ExplainError::DegenerateDesign);
    }

    let texts: Vec<String> = masks
        .iter()
        .map(|mask| mask_to_text(&tokens, mask, &MaskMode::Delete))
        .collect();
    let preds = predictor.predict_fake(&texts)?;

    let weights: Vec<f64> = masks
        .iter()
        .map(|mask| {
            let kept = mask.iter().filter(|b| **b).count() as f64;
            let d = 1.0 - (kept / m as f64).sqrt();
            (-d * d / (cfg.kernel_width * cfg.kernel_width)).exp()
        })
        .collect();

    // Weighted ridge with intercept: solve (X^T W X + lambda R) beta = X^T W y,
    // R the identity with the intercept entry zeroed.
    let n = masks.len();
    let p = m + 1;
    let mut xtwx = DMatrix::<f64>::zeros(p, p);
    let mut xtwy = DVector::<f64>::zeros(p);
    let mut row = vec![0.0; p];
    for i in 0..n {
        row[0] = 1.0;
        for (j, bit) in masks[i].iter().enumerate() {
            row[j + 1] = f64::from(*bit);
        }
        let w = weights[i];
        for a in 0..p {
            let wa = w * row[a];
            if wa == 0.0 {
                continue;
            }
            for b in 0..p {
                xtwx[(a, b)] += wa * row[b];
            }
            xtwy[a] += wa * preds[i];
        }
    }
    for j in 1..p {
        xtwx[(j, j)] += cfg.ridge_lambda;
    }

    let beta = xtwx
        .lu()
        .solve(&xtwy)
        .ok_or(ExplainError::DegenerateDesign)?;

    let mut scores: Vec<f64> = beta.iter().skip(1).copied().collect();
    if let Some(k) = cfg.top_k {
        keep_top_k(&mut scores, k);
    }

    Ok(Attribution {
        method: Method::Lime,
        tokens,
        scores,
        base_value: beta[0],
        meta: AttributionMeta {
            n_samples: cfg.n_samples,
            kernel_width: cfg.kernel_width,
            ridge_lambda: cfg.ridge_lambda,
            seed: cfg.seed,
        },
    })
}

/// Zero every entry except the k largest by magnitude (ties resolved by
/// earlier index).
fn keep_top_k(scores: &mut [f64], k: usize) {
    if k >= scores.len() {
        return;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|a, b| {
        scores[*b]
            .abs()
            .total_cmp(&scores[*a].abs())
            .then(a.cmp(b))
    });
    for &idx in &order[k..] {
        scores[idx] = 0.0;
    }
}
