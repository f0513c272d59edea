//! Phase 1 (frozen backbone) and Phase 2 (progressive unfreezing with LLRD).

use std::time::Instant;

use super::adamw::{adamw_step, AdamWState};
use super::sampler::{balanced_batches, shuffled_batches};
use super::{llrd_lrs, EpochRecord, GroupLr, TrainError, TrainLog, TrainPlan};
use crate::corpus::{Label, TokenizedInput};
use crate::metrics::{confusion, f1};
use crate::model::{backward, decide, forward, DecisionConfig, ForwardMode, GroupId, ModelParams};
use crate::seed::derive_seed;

/// One encoded training sample.
#[derive(Debug, Clone)]
pub struct TrainSample {
    pub input: TokenizedInput,
    pub label: Label,
}

/// Mean cross-entropy of the two-class softmax outputs.
pub fn cross_entropy_loss(probs: &[[f64; 2]], labels: &[Label]) -> f64 {
    let sum: f64 = probs
        .iter()
        .zip(labels)
        .map(|(p, l)| -p[l.index()].max(1e-300).ln())
        .sum();
    sum / probs.len() as f64
}

fn logit_grads(probs: &[[f64; 2]], labels: &[Label]) -> Vec<[f64; 2]> {
    let scale = 1.0 / probs.len() as f64;
    probs
        .iter()
        .zip(labels)
        .map(|(p, l)| {
            let mut g = [p[0] * scale, p[1] * scale];
            g[l.index()] -= scale;
            g
        })
        .collect()
}

/// Validation F1 of the Fake class at tau = 0.5.
fn validation_f1(
    params: &ModelParams,
    val: &[TrainSample],
    batch_size: usize,
) -> Result<f64, TrainError> {
    let dc = DecisionConfig { tau: 0.5 };
    let truth: Vec<Label> = val.iter().map(|s| s.label).collect();
    let mut pred = Vec::with_capacity(val.len());
    for chunk in val.chunks(batch_size) {
        let inputs: Vec<TokenizedInput> = chunk.iter().map(|s| s.input.clone()).collect();
        let (probs, _) = forward(params, &inputs, ForwardMode::Eval)?;
        pred.extend(probs.iter().map(|p| decide(p[1], &dc)));
    }
    Ok(f1(&confusion(&pred, &truth)?))
}

struct EpochStats {
    loss: f64,
    seconds: f64,
}

/// Run one epoch of batched forward/backward/AdamW updates.
fn run_epoch(
    params: &mut ModelParams,
    state: &mut AdamWState,
    train: &[TrainSample],
    plan: &TrainPlan,
    lr_per_group: &[f64],
    phase: u8,
    epoch: usize,
) -> Result<EpochStats, TrainError> {
    let start = Instant::now();
    let labels: Vec<Label> = train.iter().map(|s| s.label).collect();
    let batch_seed = derive_seed(plan.seed, &format!("phase{phase}.batches.e{epoch}"));
    let batches = if plan.balanced_sampling {
        balanced_batches(&labels, plan.batch_size, batch_seed)?
    } else {
        shuffled_batches(train.len(), plan.batch_size, batch_seed)
    };

    let mut loss_sum = 0.0;
    let mut n_seen = 0usize;
    for (bi, batch) in batches.iter().enumerate() {
        let inputs: Vec<TokenizedInput> = batch.iter().map(|i| train[*i].input.clone()).collect();
        let batch_labels: Vec<Label> = batch.iter().map(|i| train[*i].label).collect();
        let dropout_seed = derive_seed(plan.seed, &format!("phase{phase}.drop.e{epoch}.b{bi}"));
        let (probs, cache) = forward(params, &inputs, ForwardMode::Train { dropout_seed })?;
        let batch_loss = cross_entropy_loss(&probs, &batch_labels);
        if !batch_loss.is_finite() {
            return Err(TrainError::NonFiniteLoss(epoch));
        }
        loss_sum += batch_loss * batch.len() as f64;
        n_seen += batch.len();

        let dlogits = logit_grads(&probs, &batch_labels);
        let grads = backward(params, &cache, &dlogits)?;
        adamw_step(params, &grads, state, lr_per_group, &plan.optimizer)?;
    }

    Ok(EpochStats {
        loss: loss_sum / n_seen as f64,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Phase 1: freeze the backbone, train pool + head with cross-entropy.
///
/// Backbone parameters are bitwise unchanged afterwards (freeze contract).
pub fn train_phase1(
    params: &mut ModelParams,
    plan: &TrainPlan,
    train: &[TrainSample],
    val: Option<&[TrainSample]>,
) -> Result<TrainLog, TrainError> {
    plan.validate()?;
    params.freeze_backbone();
    let mut state = AdamWState::new(params);
    let head_group: GroupId = params.n_groups() - 1;
    let mut lr_per_group = vec![0.0; params.n_groups()];
    lr_per_group[head_group] = plan.phase1.head_lr;

    let mut log = TrainLog::default();
    for epoch in 1..=plan.phase1.epochs {
        let stats = run_epoch(params, &mut state, train, plan, &lr_per_group, 1, epoch)?;
        let val_f1 = match val {
            Some(v) if !v.is_empty() => Some(validation_f1(params, v, plan.batch_size)?),
            _ => None,
        };
        log.records.push(EpochRecord {
            epoch,
            phase: 1,
            loss: stats.loss,
            val_f1,
            lrs: vec![GroupLr {
                group: "head".to_string(),
                lr: plan.phase1.head_lr,
            }],
            frozen: params.frozen_group_names(),
            seconds: stats.seconds,
        });
    }
    Ok(log)
}

/// What phase 2 produced: the log, the last-epoch parameters, and the epoch
/// whose checkpoint was restored into the caller's `params` (best validation
/// F1 when early stopping is configured, last epoch otherwise).
#[derive(Debug)]
pub struct Phase2Outcome {
    pub log: TrainLog,
    pub final_params: ModelParams,
    pub restored_epoch: usize,
}

/// Tracks strict-improvement early stopping over validation F1.
struct EarlyStopper {
    patience: usize,
    min_delta: f64,
    best: f64,
    stale: usize,
}

impl EarlyStopper {
    fn new(patience: usize, min_delta: f64) -> Self {
        EarlyStopper {
            patience,
            min_delta,
            best: f64::NEG_INFINITY,
            stale: 0,
        }
    }

    /// Returns (improved, stop_now).
    fn observe(&mut self, value: f64) -> (bool, bool) {
        if value > self.best + self.min_delta {
            self.best = value;
            self.stale = 0;
            (true, false)
        } else {
            self.stale += 1;
            (false, self.stale >= self.patience)
        }
    }
}

/// Phase 2: progressive top-down unfreezing with layer-wise learning rates.
///
/// Every `unfreeze_interval` epochs the next group (layer_N, ..., layer_1,
/// embeddings) unfreezes and trains at its LLRD rate. Optimizer moments are
/// fresh (phase 1 state is head-only and meaningless for new groups). With
/// early stopping configured the caller's `params` end at the best-F1
/// checkpoint; `final_params` always holds the last epoch's state.
pub fn train_phase2(
    params: &mut ModelParams,
    plan: &TrainPlan,
    train: &[TrainSample],
    val: Option<&[TrainSample]>,
) -> Result<Phase2Outcome, TrainError> {
    plan.validate()?;
    if plan.early_stopping.is_some() && val.map_or(true, |v| v.is_empty()) {
        return Err(TrainError::MissingValidation);
    }

    let n_groups = params.n_groups();
    let n_layers = params.config.n_layers;
    let n_backbone = n_layers + 1;
    let schedule = llrd_lrs(&plan.phase2.llrd, n_groups)?;

    // Schedule index 0 is the head; map each group id to its depth.
    let mut lr_per_group = vec![0.0; n_groups];
    lr_per_group[n_groups - 1] = schedule[0];
    for layer_group in 1..=n_layers {
        lr_per_group[layer_group] = schedule[n_layers - layer_group + 1];
    }
    lr_per_group[0] = schedule[n_backbone];
    let logged_lrs: Vec<GroupLr> = (0..n_groups)
        .rev()
        .map(|g| GroupLr {
            group: params.group_name(g),
            lr: lr_per_group[g],
        })
        .collect();

    let mut state = AdamWState::new(params);
    let mut stopper = plan
        .early_stopping
        .as_ref()
        .map(|es| EarlyStopper::new(es.patience, es.min_delta));
    let mut best: Option<(usize, ModelParams)> = None;
    let mut log = TrainLog::default();
    let mut last_epoch = plan.phase1.epochs;

    for e2 in 1..=plan.phase2.epochs {
        let epoch = plan.phase1.epochs + e2;
        last_epoch = epoch;

        // Unfreeze the top `released` backbone groups.
        let released = ((e2 - 1) / plan.phase2.unfreeze_interval + 1).min(n_backbone);
        params.set_frozen(n_groups - 1, false);
        for layer_group in 1..=n_layers {
            let depth_from_top = n_layers - layer_group + 1;
            params.set_frozen(layer_group, depth_from_top > released);
        }
        params.set_frozen(0, n_backbone > released);

        let stats = run_epoch(params, &mut state, train, plan, &lr_per_group, 2, epoch)?;
        let val_f1 = match val {
            Some(v) if !v.is_empty() => Some(validation_f1(params, v, plan.batch_size)?),
            _ => None,
        };
        log.records.push(EpochRecord {
            epoch,
            phase: 2,
            loss: stats.loss,
            val_f1,
            lrs: logged_lrs.clone(),
            frozen: params.frozen_group_names(),
            seconds: stats.seconds,
        });

        if let (Some(stopper), Some(f1_now)) = (stopper.as_mut(), val_f1) {
            let (improved, stop) = stopper.observe(f1_now);
            if improved {
                best = Some((epoch, params.clone()));
            }
            if stop {
                break;
            }
        }
    }

    let final_params = params.clone();
    let restored_epoch = match best {
        Some((epoch, snapshot)) => {
            *params = snapshot;
            epoch
        }
        None => last_epoch,
    };
    Ok(Phase2Outcome {
        log,
        final_params,
        restored_epoch,
    })
}
