//! Two-phase training curriculum.
//!
//! Phase 1 freezes the backbone and trains only the attention pool plus
//! classification head. Phase 2 progressively unfreezes parameter groups from
//! the top layer down to the embeddings, one group per interval, each
//! training at its layer-wise decayed learning rate from the moment it
//! unfreezes. Early stopping monitors validation F1 of the Fake class and
//! restores the best checkpoint.
//!
//! Training is fully deterministic: (plan, seed, dataset) fixes the entire
//! log and the final parameters bit-for-bit.

mod adamw;
mod phases;
mod sampler;

pub use adamw::{adamw_step, AdamWState, OptimConfig};
pub use phases::{cross_entropy_loss, train_phase1, train_phase2, Phase2Outcome, TrainSample};
pub use sampler::balanced_batches;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::MetricsError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("llrd decay must lie in (0,1], got {0}")]
    InvalidDecay(f64),
    #[error("invalid train plan: {0}")]
    InvalidPlan(String),
    #[error("non-finite gradient in parameter group '{0}'")]
    NonFiniteGradient(String),
    #[error("non-finite loss at epoch {0}")]
    NonFiniteLoss(usize),
    #[error("dataset contains a single class; balanced sampling needs both")]
    SingleClass,
    #[error("early stopping requires a non-empty validation set")]
    MissingValidation,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Layer-wise learning-rate decay: the top group (head) trains at `base_lr`,
/// each group below at `decay` times the one above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlrdSchedule {
    pub base_lr: f64,
    pub decay: f64,
}

/// Per-group learning rates, top to bottom: `[head, layer_N, ..., layer_1,
/// embeddings]`, so entry `i` is `base_lr * decay^i`.
pub fn llrd_lrs(schedule: &LlrdSchedule, n_groups: usize) -> Result<Vec<f64>, TrainError> {
    if !(schedule.decay > 0.0 && schedule.decay <= 1.0) {
        return Err(TrainError::InvalidDecay(schedule.decay));
    }
    assert!(n_groups >= 1, "n_groups must be >= 1");
    Ok((0..n_groups)
        .map(|depth| schedule.base_lr * schedule.decay.powi(depth as i32))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase1Config {
    pub epochs: usize,
    pub head_lr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase2Config {
    pub epochs: usize,
    pub llrd: LlrdSchedule,
    /// Epochs between unfreezing successive groups (top to bottom).
    pub unfreeze_interval: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStoppingConfig {
    pub patience: usize,
    pub min_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainPlan {
    pub phase1: Phase1Config,
    pub phase2: Phase2Config,
    pub optimizer: OptimConfig,
    pub batch_size: usize,
    pub early_stopping: Option<EarlyStoppingConfig>,
    pub balanced_sampling: bool,
    pub seed: u64,
}

impl TrainPlan {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.phase1.epochs < 1 || self.phase2.epochs < 1 {
            return Err(TrainError::InvalidPlan("epochs must be >= 1".into()));
        }
        if self.phase2.unfreeze_interval < 1 {
            return Err(TrainError::InvalidPlan("unfreeze_interval must be >= 1".into()));
        }
        if self.batch_size < 1 {
            return Err(TrainError::InvalidPlan("batch_size must be >= 1".into()));
        }
        if let Some(es) = &self.early_stopping {
            if es.patience < 1 {
                return Err(TrainError::InvalidPlan("patience must be >= 1".into()));
            }
        }
        if self.optimizer.weight_decay < 0.0 {
            return Err(TrainError::InvalidPlan("weight_decay must be >= 0".into()));
        }
        llrd_lrs(&self.phase2.llrd, 1)?;
        Ok(())
    }
}

/// One learning-rate entry of an epoch record, keyed by group name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupLr {
    pub group: String,
    pub lr: f64,
}

/// One line of the training log. `seconds` is wall-clock time and is the only
/// non-deterministic field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub phase: u8,
    pub loss: f64,
    pub val_f1: Option<f64>,
    pub lrs: Vec<GroupLr>,
    pub frozen: Vec<String>,
    pub seconds: f64,
}

/// Line-delimited training log, one JSON record per epoch.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub records: Vec<EpochRecord>,
}

impl TrainLog {
    pub fn write_jsonl(&self, path: &std::path::Path) -> std::io::Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for r in &self.records {
            serde_json::to_writer(&mut f, r)?;
            f.write_all(b"\n")?;
        }
        f.flush()
    }

    pub fn read_jsonl(path: &std::path::Path) -> std::io::Result<Self> {
        let content = std::fs::read_to_string(path)?;
        let mut records = Vec::new();
        for line in content.lines().filter(|l| !l.trim().is_empty()) {
            records.push(serde_json::from_str(line)?);
        }
        Ok(TrainLog { records })
    }
}
