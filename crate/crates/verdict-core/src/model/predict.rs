//! The black-box predictor surface.
//!
//! [`TextPredictor`] is the only interface explainers and evaluation touch: a
//! pure, deterministic map from texts to fake-class probabilities. It is
//! implemented by the transformer ([`ModelPredictor`]), by the TF-IDF
//! baseline, and by any `Fn(&[String]) -> Vec<f64>` closure (used heavily in
//! tests).

use super::forward::{forward, ForwardMode};
use super::{ModelError, ModelParams};
use crate::corpus::{clean_text, encode_text, TokenizedInput, Vocab};
use crate::exec;

/// Black-box scoring interface: p(fake) per text.
///
/// Implementations must be pure (no internal state mutation) and safe to call
/// concurrently; explainers rely on both.
pub trait TextPredictor: Sync {
    fn predict_fake(&self, texts: &[String]) -> Result<Vec<f64>, ModelError>;
}

impl<F> TextPredictor for F
where
    F: Fn(&[String]) -> Vec<f64> + Sync,
{
    fn predict_fake(&self, texts: &[String]) -> Result<Vec<f64>, ModelError> {
        Ok(self(texts))
    }
}

/// Score texts with the transformer in eval mode (dropout off).
///
/// Each text is cleaned, encoded against `vocab`, and run through its own
/// single-sample forward pass, so a batch entry equals the same text scored
/// alone bit-for-bit. Texts that clean to zero tokens propagate the
/// empty-input error.
pub fn predict_proba(
    params: &ModelParams,
    texts: &[String],
    vocab: &Vocab,
    max_len: usize,
) -> Result<Vec<f64>, ModelError> {
    let results = exec::map_slice(texts, |text| {
        let tok: TokenizedInput = encode_text(&clean_text(text), vocab, max_len);
        forward(params, std::slice::from_ref(&tok), ForwardMode::Eval)
            .map(|(probs, _)| probs[0][1])
    });
    results.into_iter().collect()
}

/// [`TextPredictor`] view over a trained (or initialized) model.
pub struct ModelPredictor<'a> {
    pub params: &'a ModelParams,
    pub vocab: &'a Vocab,
    pub max_len: usize,
}

impl<'a> ModelPredictor<'a> {
    pub fn new(params: &'a ModelParams, vocab: &'a Vocab) -> Self {
        ModelPredictor {
            params,
            vocab,
            max_len: params.config.max_len,
        }
    }
}

impl TextPredictor for ModelPredictor<'_> {
    fn predict_fake(&self, texts: &[String]) -> Result<Vec<f64>, ModelError> {
        predict_proba(self.params, texts, self.vocab, self.max_len)
    }
}
