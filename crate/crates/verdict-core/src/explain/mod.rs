//! Post-hoc explainability over the black-box predictor surface.
//!
//! Three methods, all operating purely through
//! [`crate::model::TextPredictor`]:
//!
//! - [`lime_explain`]: weighted ridge regression on token-deletion
//!   perturbations around one instance.
//! - [`exact_shapley`]: brute-force Shapley values over all `2^M` coalitions
//!   (the ground-truth oracle, bounded at M <= 15).
//! - [`kernel_shap`]: Shapley estimation by kernel-weighted least squares
//!   with the efficiency constraint enforced exactly by variable
//!   elimination; exhaustive enumeration or seeded coalition sampling.
//!
//! Evaluation budgets (total predictor evaluations, i.e. texts scored):
//! `n_samples` for LIME, `2^M` for exact Shapley and exhaustive KernelSHAP,
//! `n_coalitions + 2` for sampled KernelSHAP. Duplicated surface tokens are
//! separate position-indexed features; display-level aggregation is the
//! renderer's job.

mod compare;
mod lime;
mod masking;
mod shapley;

pub use compare::{compare_attributions, AttributionComparison};
pub use lime::{lime_explain, LimeConfig};
pub use masking::{mask_to_text, MaskMode};
pub use shapley::{
    exact_shapley, kernel_shap, shapley_kernel_weight, CoalitionBudget,
    EXACT_SHAPLEY_MAX_FEATURES,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("text has no tokens to attribute")]
    NoTokens,
    #[error("n_samples must be at least {needed} for {got} tokens")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate perturbation design (all masks identical); increase n_samples")]
    DegenerateDesign,
    #[error("singular constrained system; increase n_coalitions")]
    SingularSystem,
    #[error("Shapley kernel weight is infinite at s={s} for M={m}; the constrained solve handles the endpoints instead")]
    KernelEndpoint { s: usize, m: usize },
    #[error("exact Shapley is bounded at {max} features, got {got}")]
    TooManyFeatures { got: usize, max: usize },
    #[error("KernelSHAP needs at least 2 features, got {got}")]
    TooFewFeatures { got: usize },
    #[error("attributions cover different token lists")]
    TokenMismatch,
    #[error(transparent)]
    Predict(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Lime,
    KernelShap,
    ExactShapley,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Lime => "LIME",
            Method::KernelShap => "KernelSHAP",
            Method::ExactShapley => "ExactShapley",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionMeta {
    /// Total predictor evaluations spent.
    pub n_samples: usize,
    pub kernel_width: f64,
    pub ridge_lambda: f64,
    pub seed: u64,
}

/// Per-token importance scores. Positive pushes toward Fake.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub method: Method,
    pub tokens: Vec<String>,
    pub scores: Vec<f64>,
    pub base_value: f64,
    pub meta: AttributionMeta,
}

impl Attribution {
    pub fn write_json(&self, path: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self).expect("serializes"))
    }

    pub fn read_json(path: &std::path::Path) -> std::io::Result<Self> {
        let content = std::fs::read_to_string(path)?;
        serde_json::from_str(&content).map_err(std::io::Error::other)
    }
}
