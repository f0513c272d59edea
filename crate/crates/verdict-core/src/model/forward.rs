//! Forward pass with full activation caching for exact backprop.
//!
//! Encoder blocks are pre-norm: `x + Attn(LN(x))`, then `x + FF(LN(x))`.
//! Each sample is processed on its non-PAD prefix only (encode pads on the
//! right, so the mask is a prefix). Dropping the PAD tail is exact: PAD keys
//! would receive zero attention weight and zero pool weight, so they never
//! contribute to any output and their parameters never receive gradient.
//! Dropout exists only in the classification head and is active only in
//! train mode.

use ndarray::{s, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ModelError, ModelParams};
use crate::corpus::TokenizedInput;
use crate::exec;
use crate::seed::splitmix64;

pub(crate) const LN_EPS: f64 = 1e-5;

/// Forward execution mode. Train mode activates head dropout, with masks
/// derived deterministically from the given seed and the sample index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForwardMode {
    Eval,
    Train { dropout_seed: u64 },
}

pub(crate) struct LnCache {
    pub xhat: Array2<f64>,
    pub inv_std: Array1<f64>,
}

pub(crate) struct LayerCache {
    pub ln1: LnCache,
    pub a: Array2<f64>,
    pub q: Array2<f64>,
    pub k: Array2<f64>,
    pub v: Array2<f64>,
    /// Per-head row-softmax attention matrices, each `n x n`.
    pub attn: Vec<Array2<f64>>,
    /// Concatenated head outputs before the output projection.
    pub ctx: Array2<f64>,
    pub ln2: LnCache,
    pub f: Array2<f64>,
    pub ff_pre: Array2<f64>,
    pub ff_act: Array2<f64>,
}

pub(crate) struct SampleCache {
    pub ids: Vec<u32>,
    pub n: usize,
    pub layers: Vec<LayerCache>,
    pub x_final: Array2<f64>,
    pub pool_alpha: Array1<f64>,
    pub h_cls: Array1<f64>,
    pub head_pre1: Array1<f64>,
    /// Inverted-dropout mask (entries 0 or 1/(1-p)); `None` in eval mode.
    pub drop_mask: Option<Array1<f64>>,
    pub head_hidden: Array1<f64>,
    pub probs: [f64; 2],
}

/// All intermediate activations of one forward call.
pub struct ForwardCache {
    pub(crate) samples: Vec<SampleCache>,
    pub(crate) n_layers: usize,
    pub(crate) d_model: usize,
}

impl ForwardCache {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Attention-pool weights of one sample, zero-extended to `padded_len`.
    /// Non-PAD positions carry the softmax weights; PAD positions are exactly
    /// zero.
    pub fn pool_weights(&self, sample: usize, padded_len: usize) -> Vec<f64> {
        let alpha = &self.samples[sample].pool_alpha;
        let mut out = vec![0.0; padded_len];
        for (i, w) in alpha.iter().enumerate() {
            out[i] = *w;
        }
        out
    }

    pub fn probs(&self, sample: usize) -> [f64; 2] {
        self.samples[sample].probs
    }
}

/// Run the encoder and head over a batch.
///
/// Returns per-sample `[p_real, p_fake]` (each row sums to one) plus the
/// activation cache consumed by [`super::backward`]. Samples are independent
/// and mapped in parallel; output order matches input order bit-for-bit.
pub fn forward(
    params: &ModelParams,
    batch: &[TokenizedInput],
    mode: ForwardMode,
) -> Result<(Vec<[f64; 2]>, ForwardCache), ModelError> {
    if batch.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    let results = exec::map_indexed(batch, |i, tok| {
        let drop = match mode {
            ForwardMode::Eval => None,
            ForwardMode::Train { dropout_seed } => Some((
                params.config.dropout_rate,
                splitmix64(dropout_seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            )),
        };
        forward_sample(params, tok, drop).map_err(|e| match e {
            ModelError::EmptyInput { .. } => ModelError::EmptyInput { index: i },
            other => other,
        })
    });
    let mut samples = Vec::with_capacity(batch.len());
    for r in results {
        samples.push(r?);
    }
    let probs = samples.iter().map(|s| s.probs).collect();
    Ok((
        probs,
        ForwardCache {
            samples,
            n_layers: params.config.n_layers,
            d_model: params.config.d_model,
        },
    ))
}

fn forward_sample(
    params: &ModelParams,
    tok: &TokenizedInput,
    drop: Option<(f64, u64)>,
) -> Result<SampleCache, ModelError> {
    let cfg = &params.config;
    let t = &params.tensors;
    let n = tok.n_real.min(cfg.max_len);
    if n == 0 {
        return Err(ModelError::EmptyInput { index: 0 });
    }
    let ids = &tok.ids[..n];
    for id in ids {
        if *id as usize >= cfg.vocab_size {
            return Err(ModelError::TokenOutOfRange {
                id: *id,
                vocab_size: cfg.vocab_size,
            });
        }
    }

    let d = cfg.d_model;
    let n_heads = cfg.n_heads;
    let dk = d / n_heads;
    let scale = 1.0 / (dk as f64).sqrt();

    let mut x = Array2::zeros((n, d));
    for (i, id) in ids.iter().enumerate() {
        let row = &t.token_emb.row(*id as usize) + &t.pos_emb.row(i);
        x.row_mut(i).assign(&row);
    }

    let mut layer_caches = Vec::with_capacity(cfg.n_layers);
    for l in &t.layers {
        let ln1 = layer_norm(&x);
        let a = &ln1.xhat * &l.ln1_gain + &l.ln1_bias;
        let q = a.dot(&l.wq.t()) + &l.bq;
        let k = a.dot(&l.wk.t()) + &l.bk;
        let v = a.dot(&l.wv.t()) + &l.bv;

        let mut attn = Vec::with_capacity(n_heads);
        let mut ctx = Array2::zeros((n, d));
        for h in 0..n_heads {
            let cols = s![.., h * dk..(h + 1) * dk];
            let qh = q.slice(cols);
            let kh = k.slice(cols);
            let vh = v.slice(cols);
            let mut scores = qh.dot(&kh.t());
            scores.mapv_inplace(|v| v * scale);
            let probs = softmax_rows(&scores);
            ctx.slice_mut(cols).assign(&probs.dot(&vh));
            attn.push(probs);
        }
        let attn_out = ctx.dot(&l.wo.t()) + &l.bo;
        let x_mid = &x + &attn_out;

        let ln2 = layer_norm(&x_mid);
        let f = &ln2.xhat * &l.ln2_gain + &l.ln2_bias;
        let ff_pre = f.dot(&l.w_ff1.t()) + &l.b_ff1;
        let ff_act = ff_pre.mapv(|v| v.max(0.0));
        let ff_out = ff_act.dot(&l.w_ff2.t()) + &l.b_ff2;
        let x_out = &x_mid + &ff_out;

        layer_caches.push(LayerCache {
            ln1,
            a,
            q,
            k,
            v,
            attn,
            ctx,
            ln2,
            f,
            ff_pre,
            ff_act,
        });
        x = x_out;
    }

    // Attention pooling over the non-PAD positions.
    let scores = x.dot(&t.pool_u);
    let alpha = softmax_vec(&scores);
    let h_cls = x.t().dot(&alpha);

    // Head: Softmax(W2 . Dropout(ReLU(W1 . h_cls + b1)) + b2).
    let pre1 = t.head_w1.dot(&h_cls) + &t.head_b1;
    let relu = pre1.mapv(|v| v.max(0.0));
    let (hidden, drop_mask) = match drop {
        Some((rate, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let keep_scale = 1.0 / (1.0 - rate);
            let mask = Array1::from_iter(
                (0..relu.len()).map(|_| if rng.random::<f64>() >= rate { keep_scale } else { 0.0 }),
            );
            (&relu * &mask, Some(mask))
        }
        None => (relu.clone(), None),
    };
    let logits = t.head_w2.dot(&hidden) + &t.head_b2;
    let probs = softmax2(logits[0], logits[1]);

    Ok(SampleCache {
        ids: ids.to_vec(),
        n,
        layers: layer_caches,
        x_final: x,
        pool_alpha: alpha,
        h_cls,
        head_pre1: pre1,
        drop_mask,
        head_hidden: hidden,
        probs,
    })
}

pub(crate) fn layer_norm(x: &Array2<f64>) -> LnCache {
    let (n, d) = x.dim();
    let mut xhat = Array2::zeros((n, d));
    let mut inv_std = Array1::zeros(n);
    for i in 0..n {
        let row = x.row(i);
        let mean = row.sum() / d as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
        let inv = 1.0 / (var + LN_EPS).sqrt();
        inv_std[i] = inv;
        for j in 0..d {
            xhat[[i, j]] = (row[j] - mean) * inv;
        }
    }
    LnCache { xhat, inv_std }
}

fn softmax_rows(scores: &Array2<f64>) -> Array2<f64> {
    let (n, m) = scores.dim();
    let mut out = Array2::zeros((n, m));
    for i in 0..n {
        let row = scores.row(i);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for j in 0..m {
            let e = (row[j] - max).exp();
            out[[i, j]] = e;
            sum += e;
        }
        for j in 0..m {
            out[[i, j]] /= sum;
        }
    }
    out
}

fn softmax_vec(scores: &Array1<f64>) -> Array1<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = scores.mapv(|v| (v - max).exp());
    let sum = out.sum();
    out.mapv_inplace(|v| v / sum);
    out
}

pub(crate) fn softmax2(z0: f64, z1: f64) -> [f64; 2] {
    let max = z0.max(z1);
    let e0 = (z0 - max).exp();
    let e1 = (z1 - max).exp();
    let sum = e0 + e1;
    [e0 / sum, e1 / sum]
}
