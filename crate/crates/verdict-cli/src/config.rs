//! Run configuration: TOML sections mirroring the core module types.
//!
//! Every key has a default, so an absent file or empty section is valid. The
//! root seed fans out to per-stage seeds (`derive_seed(root, stage)`), which
//! keeps every stage independently reproducible.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use verdict_core::model::{DecisionConfig, ModelConfig};
use verdict_core::seed::derive_seed;
use verdict_core::trainer::{
    EarlyStoppingConfig, LlrdSchedule, OptimConfig, Phase1Config, Phase2Config, TrainPlan,
};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root seed; every stage derives its own stream from it.
    pub seed: u64,
    pub corpus: CorpusSection,
    pub model: ModelSection,
    pub decision: DecisionSection,
    pub train: TrainSection,
    pub baseline: BaselineSection,
    pub explain: ExplainSection,
    pub bench: BenchSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            corpus: CorpusSection::default(),
            model: ModelSection::default(),
            decision: DecisionSection::default(),
            train: TrainSection::default(),
            baseline: BaselineSection::default(),
            explain: ExplainSection::default(),
            bench: BenchSection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    /// "synthetic" or "csv".
    pub source: String,
    pub csv_path: String,
    pub id_column: String,
    pub text_column: String,
    pub label_column: String,
    /// Synthetic documents per class.
    pub n_per_class: usize,
    pub train_fraction: f64,
    /// 0 disables the validation split.
    pub validation_fraction: f64,
    pub test_fraction: f64,
    pub min_freq: usize,
    pub max_vocab: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            source: "synthetic".to_string(),
            csv_path: String::new(),
            id_column: "id".to_string(),
            text_column: "text".to_string(),
            label_column: "label".to_string(),
            n_per_class: 500,
            train_fraction: 0.8,
            validation_fraction: 0.1,
            test_fraction: 0.1,
            min_freq: 1,
            max_vocab: 5000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub max_len: usize,
    pub d_model: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    pub d_ff: usize,
    pub d_head_hidden: usize,
    pub dropout: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            max_len: 64,
            d_model: 64,
            n_layers: 2,
            n_heads: 4,
            d_ff: 128,
            d_head_hidden: 64,
            dropout: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionSection {
    pub tau: f64,
}

impl Default for DecisionSection {
    fn default() -> Self {
        DecisionSection { tau: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub phase1_epochs: usize,
    pub phase1_lr: f64,
    pub phase2_epochs: usize,
    pub base_lr: f64,
    pub llrd_decay: f64,
    pub unfreeze_interval: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub balanced_sampling: bool,
    pub early_stopping: bool,
    pub patience: usize,
    pub min_delta: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            phase1_epochs: 3,
            phase1_lr: 3e-3,
            phase2_epochs: 9,
            base_lr: 1e-3,
            llrd_decay: 0.9,
            unfreeze_interval: 1,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
            batch_size: 32,
            balanced_sampling: true,
            early_stopping: true,
            patience: 3,
            min_delta: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
}

impl Default for BaselineSection {
    fn default() -> Self {
        BaselineSection {
            l2: 1e-4,
            epochs: 300,
            lr: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainSection {
    pub n_samples: usize,
    pub kernel_width: f64,
    pub ridge_lambda: f64,
    /// 0 keeps every coefficient.
    pub top_k: usize,
    pub n_coalitions: usize,
    /// KernelSHAP enumerates exhaustively when the token count is at most
    /// this; larger instances sample `n_coalitions` coalitions.
    pub exhaustive_max_tokens: usize,
    /// "replace" (neutral baseline token) or "delete".
    pub shap_mask: String,
}

impl Default for ExplainSection {
    fn default() -> Self {
        ExplainSection {
            n_samples: 512,
            kernel_width: 0.75,
            ridge_lambda: 1.0,
            top_k: 0,
            n_coalitions: 2048,
            exhaustive_max_tokens: 11,
            shap_mask: "replace".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub batch_size: usize,
    pub warmup_batches: usize,
    pub hardware_note: String,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            batch_size: 32,
            warmup_batches: 2,
            hardware_note: "unspecified CPU".to_string(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>, seed_override: Option<u64>) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let content = std::fs::read_to_string(p).map_err(|e| {
                    CliError::general(format!("cannot read config {}: {e}", p.display()))
                })?;
                toml::from_str(&content).map_err(|e| {
                    CliError::general(format!("cannot parse config {}: {e}", p.display()))
                })?
            }
            None => RunConfig::default(),
        };
        if let Some(seed) = seed_override {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    pub fn model_config(&self, vocab_size: usize) -> ModelConfig {
        ModelConfig {
            vocab_size,
            max_len: self.model.max_len,
            d_model: self.model.d_model,
            n_layers: self.model.n_layers,
            n_heads: self.model.n_heads,
            d_ff: self.model.d_ff,
            d_head_hidden: self.model.d_head_hidden,
            dropout_rate: self.model.dropout,
            seed: derive_seed(self.seed, "model.init"),
        }
    }

    pub fn decision_config(&self, tau_override: Option<f64>) -> DecisionConfig {
        DecisionConfig {
            tau: tau_override.unwrap_or(self.decision.tau),
        }
    }

    pub fn train_plan(&self) -> TrainPlan {
        TrainPlan {
            phase1: Phase1Config {
                epochs: self.train.phase1_epochs,
                head_lr: self.train.phase1_lr,
            },
            phase2: Phase2Config {
                epochs: self.train.phase2_epochs,
                llrd: LlrdSchedule {
                    base_lr: self.train.base_lr,
                    decay: self.train.llrd_decay,
                },
                unfreeze_interval: self.train.unfreeze_interval,
            },
            optimizer: OptimConfig {
                beta1: self.train.beta1,
                beta2: self.train.beta2,
                eps: self.train.eps,
                weight_decay: self.train.weight_decay,
            },
            batch_size: self.train.batch_size,
            early_stopping: if self.train.early_stopping {
                Some(EarlyStoppingConfig {
                    patience: self.train.patience,
                    min_delta: self.train.min_delta,
                })
            } else {
                None
            },
            balanced_sampling: self.train.balanced_sampling,
            seed: derive_seed(self.seed, "train"),
        }
    }

    pub fn validation_fraction(&self) -> Option<f64> {
        if self.corpus.validation_fraction > 0.0 {
            Some(self.corpus.validation_fraction)
        } else {
            None
        }
    }
}

/// Standard artifact paths inside the output directory.
pub struct OutPaths {
    pub dir: PathBuf,
}

impl OutPaths {
    pub fn new(dir: PathBuf) -> Self {
        OutPaths { dir }
    }

    pub fn cleaned_csv(&self) -> PathBuf {
        self.dir.join("cleaned.csv")
    }

    pub fn split_manifest(&self) -> PathBuf {
        self.dir.join("splits.csv")
    }

    pub fn checkpoint_best(&self) -> PathBuf {
        self.dir.join("checkpoint_best.ckpt")
    }

    pub fn checkpoint_final(&self) -> PathBuf {
        self.dir.join("checkpoint_final.ckpt")
    }

    pub fn train_log(&self) -> PathBuf {
        self.dir.join("train_log.jsonl")
    }

    pub fn baseline_model(&self) -> PathBuf {
        self.dir.join("baseline.json")
    }

    pub fn metrics(&self, baseline: bool) -> PathBuf {
        if baseline {
            self.dir.join("metrics_baseline.json")
        } else {
            self.dir.join("metrics.json")
        }
    }

    pub fn attribution(&self, method: &str) -> PathBuf {
        self.dir.join(format!("attribution_{method}.json"))
    }

    pub fn comparison(&self) -> PathBuf {
        self.dir.join("attribution_compare.json")
    }

    pub fn explanation_html(&self) -> PathBuf {
        self.dir.join("explanation.html")
    }

    pub fn efficiency_json(&self) -> PathBuf {
        self.dir.join("efficiency.json")
    }

    pub fn efficiency_text(&self) -> PathBuf {
        self.dir.join("efficiency.txt")
    }
}
