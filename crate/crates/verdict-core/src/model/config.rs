use serde::{Deserialize, Serialize};

use super::ModelError;

/// Architecture hyperparameters. The defaults keep gradient checks and
/// property tests fast; they are deliberately far below production model
/// sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub max_len: usize,
    pub d_model: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    pub d_ff: usize,
    /// Output width of the first head layer (W1).
    pub d_head_hidden: usize,
    pub dropout_rate: f64,
    pub seed: u64,
}

impl ModelConfig {
    /// Desk-scale default: d_model=64, 2 layers, 4 heads, d_ff=128,
    /// head hidden 64, max_len=64, dropout 0.1.
    pub fn desk_default(vocab_size: usize, seed: u64) -> Self {
        ModelConfig {
            vocab_size,
            max_len: 64,
            d_model: 64,
            n_layers: 2,
            n_heads: 4,
            d_ff: 128,
            d_head_hidden: 64,
            dropout_rate: 0.1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("vocab_size", self.vocab_size),
            ("max_len", self.max_len),
            ("d_model", self.d_model),
            ("n_layers", self.n_layers),
            ("n_heads", self.n_heads),
            ("d_ff", self.d_ff),
            ("d_head_hidden", self.d_head_hidden),
        ];
        for (name, v) in positive {
            if v < 1 {
                return Err(ModelError::InvalidConfig(format!("{name} must be >= 1")));
            }
        }
        if self.vocab_size < 2 {
            return Err(ModelError::InvalidConfig(
                "vocab_size must be >= 2 (PAD and UNK)".into(),
            ));
        }
        if self.d_model % self.n_heads != 0 {
            return Err(ModelError::InvalidConfig(format!(
                "d_model ({}) must be divisible by n_heads ({})",
                self.d_model, self.n_heads
            )));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(ModelError::InvalidConfig(format!(
                "dropout_rate must lie in [0,1), got {}",
                self.dropout_rate
            )));
        }
        Ok(())
    }
}

/// Probability threshold of the decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionConfig {
    pub tau: f64,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig { tau: 0.5 }
    }
}

impl DecisionConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(ModelError::InvalidConfig(format!(
                "tau must lie in (0,1), got {}",
                self.tau
            )));
        }
        Ok(())
    }
}
