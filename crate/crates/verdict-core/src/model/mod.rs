//! Transformer encoder with attention pooling, two-logit classification
//! head, decision rule, and the TF-IDF + logistic-regression baseline.
//!
//! The head is a two-class softmax over
//! `W2 · Dropout(ReLU(W1 · h_cls + b1)) + b2`, where `h_cls` is produced by
//! learned attention pooling over the encoder output. The single-logit
//! sigmoid view used by the decision rule is the row difference
//! `z = z_fake - z_real`; softmax over two logits and the sigmoid of that
//! difference are the same number, which keeps one parameterization behind
//! both formulations.

mod backward;
mod baseline;
mod checkpoint;
mod config;
mod forward;
mod params;
mod predict;

pub use backward::backward;
pub use baseline::{predict_tfidf, train_tfidf_logreg, BaselineConfig, TfidfLogReg};
pub use checkpoint::Checkpoint;
pub use config::{DecisionConfig, ModelConfig};
pub use forward::{forward, ForwardCache, ForwardMode};
pub use params::{init_params, GroupId, ModelParams, ParamGrads, ParamTensors};
pub use predict::{predict_proba, ModelPredictor, TextPredictor};

use thiserror::Error;

use crate::corpus::Label;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("forward called on an empty batch")]
    EmptyBatch,
    #[error("sample {index} has no non-PAD tokens")]
    EmptyInput { index: usize },
    #[error("token id {id} out of range for vocab of size {vocab_size}")]
    TokenOutOfRange { id: u32, vocab_size: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("training data contains a single class; both labels are required")]
    SingleClass,
    #[error("checkpoint at {path} is corrupt: {reason}")]
    CorruptCheckpoint { path: String, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Apply the thresholded decision rule: Fake iff `p_fake >= tau`.
///
/// The boundary is inclusive, so a probability exactly at the threshold is
/// labeled Fake.
pub fn decide(p_fake: f64, dc: &DecisionConfig) -> Label {
    if p_fake >= dc.tau {
        Label::Fake
    } else {
        Label::Real
    }
}
