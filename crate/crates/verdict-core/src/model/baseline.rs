//! TF-IDF + logistic-regression baseline.
//!
//! Features: per-document term frequency times `ln((1+N)/(1+df)) + 1`,
//! L2-normalized rows. Fitted with full-batch gradient descent on the
//! logistic loss with L2 penalty on the weights (not the intercept), from a
//! zero initialization, so training is fully deterministic.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ModelError, TextPredictor};
use crate::corpus::{clean_text, Document, Label};
use crate::exec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            l2: 1e-4,
            epochs: 300,
            lr: 1.0,
        }
    }
}

/// Fitted baseline. The vocabulary is stored sorted, so lookups go through
/// binary search and serialization is order-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfLogReg {
    vocab: Vec<String>,
    idf: Vec<f64>,
    weights: Vec<f64>,
    intercept: f64,
    pub config: BaselineConfig,
}

impl TfidfLogReg {
    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    fn featurize(&self, text: &str) -> Vec<(usize, f64)> {
        let clean = clean_text(text);
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for token in clean.split_whitespace() {
            if let Ok(idx) = self.vocab.binary_search_by(|t| t.as_str().cmp(token)) {
                *counts.entry(idx).or_insert(0.0) += 1.0;
            }
        }
        let mut feats: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(i, tf)| (i, tf * self.idf[i]))
            .collect();
        feats.sort_by_key(|(i, _)| *i);
        let norm = feats.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in feats.iter_mut() {
                *v /= norm;
            }
        }
        feats
    }

    fn score(&self, feats: &[(usize, f64)]) -> f64 {
        let z = feats
            .iter()
            .map(|(i, v)| self.weights[*i] * v)
            .sum::<f64>()
            + self.intercept;
        sigmoid(z)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Fit the baseline on training documents. Errors if only one class is
/// present.
pub fn train_tfidf_logreg(
    docs: &[Document],
    config: &BaselineConfig,
) -> Result<TfidfLogReg, ModelError> {
    let n_fake = docs.iter().filter(|d| d.label == Label::Fake).count();
    if n_fake == 0 || n_fake == docs.len() {
        return Err(ModelError::SingleClass);
    }

    // Vocabulary and document frequencies over the training set.
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut per_doc_tokens: Vec<Vec<&str>> = Vec::with_capacity(docs.len());
    for d in docs {
        let tokens: Vec<&str> = d.clean_text.split_whitespace().collect();
        let mut seen: Vec<&str> = tokens.clone();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0) += 1;
        }
        per_doc_tokens.push(tokens);
    }
    let mut vocab: Vec<String> = df.keys().map(|t| t.to_string()).collect();
    vocab.sort_unstable();
    let n_docs = docs.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|t| ((1.0 + n_docs) / (1.0 + df[t.as_str()] as f64)).ln() + 1.0)
        .collect();

    let mut model = TfidfLogReg {
        vocab,
        idf,
        weights: Vec::new(),
        intercept: 0.0,
        config: *config,
    };
    model.weights = vec![0.0; model.vocab.len()];

    // Precompute sparse L2-normalized rows.
    let rows: Vec<Vec<(usize, f64)>> = per_doc_tokens
        .iter()
        .map(|tokens| {
            let mut counts: HashMap<usize, f64> = HashMap::new();
            for token in tokens {
                if let Ok(idx) = model.vocab.binary_search_by(|t| t.as_str().cmp(token)) {
                    *counts.entry(idx).or_insert(0.0) += 1.0;
                }
            }
            let mut feats: Vec<(usize, f64)> = counts
                .into_iter()
                .map(|(i, tf)| (i, tf * model.idf[i]))
                .collect();
            feats.sort_by_key(|(i, _)| *i);
            let norm = feats.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, v) in feats.iter_mut() {
                    *v /= norm;
                }
            }
            feats
        })
        .collect();
    let targets: Vec<f64> = docs
        .iter()
        .map(|d| if d.label == Label::Fake { 1.0 } else { 0.0 })
        .collect();

    let n_inv = 1.0 / n_docs;
    for _ in 0..config.epochs {
        let mut grad_w = vec![0.0; model.weights.len()];
        let mut grad_b = 0.0;
        for (feats, y) in rows.iter().zip(&targets) {
            let err = model.score(feats) - y;
            for (i, v) in feats {
                grad_w[*i] += err * v;
            }
            grad_b += err;
        }
        for (w, g) in model.weights.iter_mut().zip(&grad_w) {
            *w -= config.lr * (g * n_inv + config.l2 * *w);
        }
        model.intercept -= config.lr * grad_b * n_inv;
    }
    Ok(model)
}

/// Score texts with a fitted baseline.
pub fn predict_tfidf(model: &TfidfLogReg, texts: &[String]) -> Vec<f64> {
    exec::map_slice(texts, |t| model.score(&model.featurize(t)))
}

impl TextPredictor for TfidfLogReg {
    fn predict_fake(&self, texts: &[String]) -> Result<Vec<f64>, ModelError> {
        Ok(predict_tfidf(self, texts))
    }
}
