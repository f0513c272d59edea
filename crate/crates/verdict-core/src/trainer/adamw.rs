//! AdamW with decoupled weight decay and per-group learning rates.
//!
//! Moments live in one flat vector per tensor, aligned with the parameter
//! visit order. Frozen groups are skipped entirely: no parameter change, no
//! moment update, no step-count advance. Step counters are per group so that
//! a group unfrozen mid-run gets proper bias correction from its first real
//! update. Weight decay multiplies by `(1 - lr_group * wd)` and skips biases
//! and layer-norm gains/biases.

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::model::{ModelParams, ParamGrads, ParamTensors};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

/// First/second moment estimates plus per-group step counters.
#[derive(Debug, Clone)]
pub struct AdamWState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    group_steps: Vec<u64>,
}

impl AdamWState {
    pub fn new(params: &ModelParams) -> Self {
        let sizes: Vec<usize> = params
            .tensors
            .flat_views()
            .iter()
            .map(|s| s.len())
            .collect();
        AdamWState {
            m: sizes.iter().map(|n| vec![0.0; *n]).collect(),
            v: sizes.iter().map(|n| vec![0.0; *n]).collect(),
            group_steps: vec![0; params.n_groups()],
        }
    }

    pub fn group_step(&self, group: usize) -> u64 {
        self.group_steps[group]
    }
}

/// One optimizer step over every unfrozen group.
///
/// `lr_per_group` is indexed by [`crate::model::GroupId`] (0 = embeddings,
/// then layers bottom-up, head last). Errors on any non-finite gradient,
/// naming the offending group.
pub fn adamw_step(
    params: &mut ModelParams,
    grads: &ParamGrads,
    state: &mut AdamWState,
    lr_per_group: &[f64],
    cfg: &OptimConfig,
) -> Result<(), TrainError> {
    let n_layers = params.config.n_layers;
    assert_eq!(lr_per_group.len(), params.n_groups(), "lr per group count");
    let meta = ParamTensors::tensor_meta(n_layers);
    let grad_slices = grads.flat_views();
    assert_eq!(meta.len(), grad_slices.len(), "grads shaped like params");

    // Finiteness check first so a failed step leaves params untouched.
    for (m, g) in meta.iter().zip(&grad_slices) {
        if params.is_frozen(m.group) {
            continue;
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(TrainError::NonFiniteGradient(params.group_name(m.group)));
        }
    }

    let mut stepped = vec![false; params.n_groups()];
    for (m, _) in meta.iter().zip(&grad_slices) {
        if !params.is_frozen(m.group) && !stepped[m.group] {
            stepped[m.group] = true;
            state.group_steps[m.group] += 1;
        }
    }

    let frozen: Vec<bool> = (0..params.n_groups()).map(|g| params.is_frozen(g)).collect();
    let mut param_slices = params.tensors.flat_views_mut();
    for (i, m) in meta.iter().enumerate() {
        if frozen[m.group] {
            continue;
        }
        adamw_update_slice(
            param_slices[i],
            grad_slices[i],
            &mut state.m[i],
            &mut state.v[i],
            state.group_steps[m.group],
            lr_per_group[m.group],
            cfg,
            m.decay,
        );
    }
    Ok(())
}

/// The element-wise AdamW update on one flat tensor.
#[allow(clippy::too_many_arguments)]
pub(crate) fn adamw_update_slice(
    param: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    step: u64,
    lr: f64,
    cfg: &OptimConfig,
    apply_decay: bool,
) {
    debug_assert_eq!(param.len(), grad.len());
    let bias1 = 1.0 - cfg.beta1.powi(step as i32);
    let bias2 = 1.0 - cfg.beta2.powi(step as i32);
    for i in 0..param.len() {
        if apply_decay && cfg.weight_decay > 0.0 {
            param[i] *= 1.0 - lr * cfg.weight_decay;
        }
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        let m_hat = m[i] / bias1;
        let v_hat = v[i] / bias2;
        param[i] -= lr * m_hat / (v_hat.sqrt() + cfg.eps);
    }
}
