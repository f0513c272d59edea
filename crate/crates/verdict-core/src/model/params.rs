//! Layered parameter tree with per-group freeze flags.
//!
//! Parameters are partitioned into freeze groups: `embeddings` (token and
//! position tables), one group per encoder layer, and `head` (attention-pool
//! vector plus both head layers). Optimizer state, gradient zeroing,
//! checkpoint serialization and parameter counting all walk the tensors in
//! one fixed visit order.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ModelConfig, ModelError};
use crate::seed::derive_seed;

/// Tensors of a single encoder layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTensors {
    pub wq: Array2<f64>,
    pub bq: Array1<f64>,
    pub wk: Array2<f64>,
    pub bk: Array1<f64>,
    pub wv: Array2<f64>,
    pub bv: Array1<f64>,
    pub wo: Array2<f64>,
    pub bo: Array1<f64>,
    pub w_ff1: Array2<f64>,
    pub b_ff1: Array1<f64>,
    pub w_ff2: Array2<f64>,
    pub b_ff2: Array1<f64>,
    pub ln1_gain: Array1<f64>,
    pub ln1_bias: Array1<f64>,
    pub ln2_gain: Array1<f64>,
    pub ln2_bias: Array1<f64>,
}

impl LayerTensors {
    fn zeros(cfg: &ModelConfig) -> Self {
        let d = cfg.d_model;
        let ff = cfg.d_ff;
        LayerTensors {
            wq: Array2::zeros((d, d)),
            bq: Array1::zeros(d),
            wk: Array2::zeros((d, d)),
            bk: Array1::zeros(d),
            wv: Array2::zeros((d, d)),
            bv: Array1::zeros(d),
            wo: Array2::zeros((d, d)),
            bo: Array1::zeros(d),
            w_ff1: Array2::zeros((ff, d)),
            b_ff1: Array1::zeros(ff),
            w_ff2: Array2::zeros((d, ff)),
            b_ff2: Array1::zeros(d),
            ln1_gain: Array1::zeros(d),
            ln1_bias: Array1::zeros(d),
            ln2_gain: Array1::zeros(d),
            ln2_bias: Array1::zeros(d),
        }
    }
}

/// The full tensor set. Doubles as the gradient container: [`ParamGrads`] is
/// this same structure holding per-tensor gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTensors {
    pub token_emb: Array2<f64>,
    pub pos_emb: Array2<f64>,
    pub layers: Vec<LayerTensors>,
    pub pool_u: Array1<f64>,
    pub head_w1: Array2<f64>,
    pub head_b1: Array1<f64>,
    pub head_w2: Array2<f64>,
    pub head_b2: Array1<f64>,
}

pub type ParamGrads = ParamTensors;

/// Freeze-group index: 0 = embeddings, `1..=n_layers` = encoder layers bottom
/// to top, `n_layers + 1` = head (pool vector plus head layers).
pub type GroupId = usize;

/// Metadata for one tensor in the fixed visit order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TensorMeta {
    pub group: GroupId,
    /// Whether decoupled weight decay applies. Biases and layer-norm
    /// gains/biases are excluded.
    pub decay: bool,
}

impl ParamTensors {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        ParamTensors {
            token_emb: Array2::zeros((cfg.vocab_size, cfg.d_model)),
            pos_emb: Array2::zeros((cfg.max_len, cfg.d_model)),
            layers: (0..cfg.n_layers).map(|_| LayerTensors::zeros(cfg)).collect(),
            pool_u: Array1::zeros(cfg.d_model),
            head_w1: Array2::zeros((cfg.d_head_hidden, cfg.d_model)),
            head_b1: Array1::zeros(cfg.d_head_hidden),
            head_w2: Array2::zeros((2, cfg.d_head_hidden)),
            head_b2: Array1::zeros(2),
        }
    }

    /// Tensor metadata in visit order. Group/name/decay are a function of the
    /// layer count only.
    pub(crate) fn tensor_meta(n_layers: usize) -> Vec<TensorMeta> {
        let head = n_layers + 1;
        let mut meta = vec![
            TensorMeta { group: 0, decay: true }, // token_emb
            TensorMeta { group: 0, decay: true }, // pos_emb
        ];
        for l in 0..n_layers {
            let g = l + 1;
            // wq bq wk bk wv bv wo bo w_ff1 b_ff1 w_ff2 b_ff2 ln1_g ln1_b ln2_g ln2_b
            let decays = [
                true, false, true, false, true, false, true, false,
                true, false, true, false, false, false, false, false,
            ];
            meta.extend(decays.into_iter().map(|decay| TensorMeta { group: g, decay }));
        }
        // pool_u head_w1 head_b1 head_w2 head_b2
        let head_decays = [true, true, false, true, false];
        meta.extend(head_decays.into_iter().map(|decay| TensorMeta { group: head, decay }));
        meta
    }

    /// Tensor shapes in visit order.
    pub(crate) fn tensor_shapes(&self) -> Vec<Vec<usize>> {
        let mut shapes = vec![
            self.token_emb.shape().to_vec(),
            self.pos_emb.shape().to_vec(),
        ];
        for l in &self.layers {
            shapes.extend([
                l.wq.shape().to_vec(),
                l.bq.shape().to_vec(),
                l.wk.shape().to_vec(),
                l.bk.shape().to_vec(),
                l.wv.shape().to_vec(),
                l.bv.shape().to_vec(),
                l.wo.shape().to_vec(),
                l.bo.shape().to_vec(),
                l.w_ff1.shape().to_vec(),
                l.b_ff1.shape().to_vec(),
                l.w_ff2.shape().to_vec(),
                l.b_ff2.shape().to_vec(),
                l.ln1_gain.shape().to_vec(),
                l.ln1_bias.shape().to_vec(),
                l.ln2_gain.shape().to_vec(),
                l.ln2_bias.shape().to_vec(),
            ]);
        }
        shapes.extend([
            self.pool_u.shape().to_vec(),
            self.head_w1.shape().to_vec(),
            self.head_b1.shape().to_vec(),
            self.head_w2.shape().to_vec(),
            self.head_b2.shape().to_vec(),
        ]);
        shapes
    }

    /// Group id of every tensor in visit order.
    pub fn tensor_groups(n_layers: usize) -> Vec<GroupId> {
        Self::tensor_meta(n_layers).iter().map(|m| m.group).collect()
    }

    /// Flat slices of every tensor in visit order.
    pub fn flat_views(&self) -> Vec<&[f64]> {
        fn s2(a: &Array2<f64>) -> &[f64] {
            a.as_slice().expect("standard layout")
        }
        fn s1(a: &Array1<f64>) -> &[f64] {
            a.as_slice().expect("standard layout")
        }
        let mut out: Vec<&[f64]> = vec![s2(&self.token_emb), s2(&self.pos_emb)];
        for l in &self.layers {
            out.extend([
                s2(&l.wq), s1(&l.bq), s2(&l.wk), s1(&l.bk), s2(&l.wv), s1(&l.bv),
                s2(&l.wo), s1(&l.bo), s2(&l.w_ff1), s1(&l.b_ff1), s2(&l.w_ff2), s1(&l.b_ff2),
                s1(&l.ln1_gain), s1(&l.ln1_bias), s1(&l.ln2_gain), s1(&l.ln2_bias),
            ]);
        }
        out.extend([
            s1(&self.pool_u), s2(&self.head_w1), s1(&self.head_b1),
            s2(&self.head_w2), s1(&self.head_b2),
        ]);
        out
    }

    /// Mutable flat slices of every tensor in visit order.
    pub fn flat_views_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        out.push(self.token_emb.as_slice_mut().expect("standard layout"));
        out.push(self.pos_emb.as_slice_mut().expect("standard layout"));
        for l in &mut self.layers {
            out.push(l.wq.as_slice_mut().expect("standard layout"));
            out.push(l.bq.as_slice_mut().expect("standard layout"));
            out.push(l.wk.as_slice_mut().expect("standard layout"));
            out.push(l.bk.as_slice_mut().expect("standard layout"));
            out.push(l.wv.as_slice_mut().expect("standard layout"));
            out.push(l.bv.as_slice_mut().expect("standard layout"));
            out.push(l.wo.as_slice_mut().expect("standard layout"));
            out.push(l.bo.as_slice_mut().expect("standard layout"));
            out.push(l.w_ff1.as_slice_mut().expect("standard layout"));
            out.push(l.b_ff1.as_slice_mut().expect("standard layout"));
            out.push(l.w_ff2.as_slice_mut().expect("standard layout"));
            out.push(l.b_ff2.as_slice_mut().expect("standard layout"));
            out.push(l.ln1_gain.as_slice_mut().expect("standard layout"));
            out.push(l.ln1_bias.as_slice_mut().expect("standard layout"));
            out.push(l.ln2_gain.as_slice_mut().expect("standard layout"));
            out.push(l.ln2_bias.as_slice_mut().expect("standard layout"));
        }
        out.push(self.pool_u.as_slice_mut().expect("standard layout"));
        out.push(self.head_w1.as_slice_mut().expect("standard layout"));
        out.push(self.head_b1.as_slice_mut().expect("standard layout"));
        out.push(self.head_w2.as_slice_mut().expect("standard layout"));
        out.push(self.head_b2.as_slice_mut().expect("standard layout"));
        out
    }

}

/// Model parameters: configuration, tensors, and per-group freeze flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub tensors: ParamTensors,
    frozen: Vec<bool>,
}

impl ModelParams {
    pub(crate) fn from_parts(config: ModelConfig, tensors: ParamTensors, frozen: Vec<bool>) -> Self {
        assert_eq!(frozen.len(), config.n_layers + 2);
        ModelParams {
            config,
            tensors,
            frozen,
        }
    }

    pub fn n_groups(&self) -> usize {
        self.config.n_layers + 2
    }

    pub fn group_name(&self, g: GroupId) -> String {
        group_name(g, self.config.n_layers)
    }

    pub fn is_frozen(&self, g: GroupId) -> bool {
        self.frozen[g]
    }

    pub fn set_frozen(&mut self, g: GroupId, frozen: bool) {
        self.frozen[g] = frozen;
    }

    pub fn frozen_flags(&self) -> &[bool] {
        &self.frozen
    }

    /// Freeze embeddings and every encoder layer; leave the head trainable.
    pub fn freeze_backbone(&mut self) {
        let n = self.n_groups();
        for g in 0..n - 1 {
            self.frozen[g] = true;
        }
        self.frozen[n - 1] = false;
    }

    pub fn unfreeze_all(&mut self) {
        self.frozen.iter_mut().for_each(|f| *f = false);
    }

    /// Names of currently frozen groups, in group order.
    pub fn frozen_group_names(&self) -> Vec<String> {
        (0..self.n_groups())
            .filter(|g| self.frozen[*g])
            .map(|g| self.group_name(g))
            .collect()
    }

    /// FNV-1a digest over the little-endian bytes of one group's tensors.
    /// Used by freeze-contract tests: bitwise-equal tensors give equal
    /// digests.
    pub fn group_digest(&self, g: GroupId) -> u64 {
        let meta = ParamTensors::tensor_meta(self.config.n_layers);
        let slices = self.tensors.flat_views();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (m, s) in meta.iter().zip(slices) {
            if m.group != g {
                continue;
            }
            for v in s {
                for b in v.to_le_bytes() {
                    h ^= u64::from(b);
                    h = h.wrapping_mul(0x0000_0100_0000_01b3);
                }
            }
        }
        h
    }

    /// Zero gradient tensors belonging to frozen groups.
    pub(crate) fn zero_frozen_groups(&self, grads: &mut ParamGrads) {
        let meta = ParamTensors::tensor_meta(self.config.n_layers);
        let mut slices = grads.flat_views_mut();
        for (m, s) in meta.iter().zip(slices.iter_mut()) {
            if self.frozen[m.group] {
                s.fill(0.0);
            }
        }
    }
}

pub fn group_name(g: GroupId, n_layers: usize) -> String {
    if g == 0 {
        "embeddings".to_string()
    } else if g <= n_layers {
        format!("layer_{g}")
    } else {
        "head".to_string()
    }
}

/// Initialize parameters: weights from a seeded scaled-uniform distribution
/// with bound `sqrt(6 / (fan_in + fan_out))`, biases and layer-norm biases
/// zero, layer-norm gains one. Deterministic given the config seed.
pub fn init_params(config: &ModelConfig) -> Result<ModelParams, ModelError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "model.init"));
    let mut t = ParamTensors::zeros(config);

    fill_uniform(&mut rng, &mut t.token_emb);
    fill_uniform(&mut rng, &mut t.pos_emb);
    for l in &mut t.layers {
        fill_uniform(&mut rng, &mut l.wq);
        fill_uniform(&mut rng, &mut l.wk);
        fill_uniform(&mut rng, &mut l.wv);
        fill_uniform(&mut rng, &mut l.wo);
        fill_uniform(&mut rng, &mut l.w_ff1);
        fill_uniform(&mut rng, &mut l.w_ff2);
        l.ln1_gain.fill(1.0);
        l.ln2_gain.fill(1.0);
    }
    fill_uniform_vec(&mut rng, &mut t.pool_u);
    fill_uniform(&mut rng, &mut t.head_w1);
    fill_uniform(&mut rng, &mut t.head_w2);

    let n_groups = config.n_layers + 2;
    Ok(ModelParams {
        config: config.clone(),
        tensors: t,
        frozen: vec![false; n_groups],
    })
}

fn fill_uniform(rng: &mut ChaCha8Rng, a: &mut Array2<f64>) {
    let (rows, cols) = a.dim();
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    for v in a.iter_mut() {
        *v = rng.random::<f64>() * 2.0 * bound - bound;
    }
}

fn fill_uniform_vec(rng: &mut ChaCha8Rng, a: &mut Array1<f64>) {
    let bound = (6.0 / (a.len() + 1) as f64).sqrt();
    for v in a.iter_mut() {
        *v = rng.random::<f64>() * 2.0 * bound - bound;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ModelConfig {
        ModelConfig {
            vocab_size: 11,
            max_len: 6,
            d_model: 8,
            n_layers: 2,
            n_heads: 2,
            d_ff: 12,
            d_head_hidden: 5,
            dropout_rate: 0.0,
            seed: 3,
        }
    }

    #[test]
    fn init_is_deterministic() {
        let cfg = small_config();
        let a = init_params(&cfg).unwrap();
        let b = init_params(&cfg).unwrap();
        assert_eq!(a.tensors, b.tensors);
    }

    #[test]
    fn init_rejects_indivisible_heads() {
        let cfg = ModelConfig {
            d_model: 8,
            n_heads: 3,
            ..small_config()
        };
        assert!(matches!(init_params(&cfg), Err(ModelError::InvalidConfig(_))));
    }

    #[test]
    fn layer_norm_gains_start_at_one_biases_zero() {
        let p = init_params(&small_config()).unwrap();
        for l in &p.tensors.layers {
            assert!(l.ln1_gain.iter().all(|v| *v == 1.0));
            assert!(l.ln2_gain.iter().all(|v| *v == 1.0));
            assert!(l.ln1_bias.iter().all(|v| *v == 0.0));
            assert!(l.bq.iter().all(|v| *v == 0.0));
        }
        assert!(p.tensors.head_b1.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn weights_respect_the_uniform_bound() {
        let p = init_params(&small_config()).unwrap();
        let bound = (6.0f64 / 16.0).sqrt();
        for v in p.tensors.layers[0].wq.iter() {
            assert!(v.abs() <= bound);
        }
    }

    #[test]
    fn group_partition_covers_all_tensors() {
        let cfg = small_config();
        let meta = ParamTensors::tensor_meta(cfg.n_layers);
        assert_eq!(meta.len(), 2 + 16 * cfg.n_layers + 5);
        assert!(meta.iter().all(|m| m.group <= cfg.n_layers + 1));
        assert_eq!(group_name(0, 2), "embeddings");
        assert_eq!(group_name(1, 2), "layer_1");
        assert_eq!(group_name(3, 2), "head");
    }

    #[test]
    fn digest_changes_with_any_group_edit() {
        let mut p = init_params(&small_config()).unwrap();
        let before = p.group_digest(1);
        let head_before = p.group_digest(3);
        p.tensors.layers[0].wq[[0, 0]] += 1.0;
        assert_ne!(p.group_digest(1), before);
        assert_eq!(p.group_digest(3), head_before);
    }
}
