//! Exact analytic backpropagation.
//!
//! Per-sample gradients are computed independently (in parallel) and reduced
//! into the full gradient in sample order, so the result is bit-identical
//! regardless of thread count. Frozen parameter groups come out exactly
//! zero.

use ndarray::{s, Array1, Array2};

use super::forward::{ForwardCache, LnCache, SampleCache};
use super::{ModelError, ModelParams, ParamGrads, ParamTensors};
use crate::exec;

/// Per-sample gradient contribution. Embedding gradients stay in their
/// `n x d` input-row form and are scattered during reduction, which keeps the
/// per-sample allocation independent of vocabulary size.
struct SampleGrads {
    ids: Vec<u32>,
    x0: Array2<f64>,
    layers: Vec<super::params::LayerTensors>,
    pool_u: Array1<f64>,
    head_w1: Array2<f64>,
    head_b1: Array1<f64>,
    head_w2: Array2<f64>,
    head_b2: Array1<f64>,
}

/// Compute gradients of the batch loss for every parameter, given
/// d(loss)/d(logits) per sample.
///
/// `cache` must come from a [`super::forward`] call on the same parameters;
/// shape mismatches are rejected. Gradients of frozen groups are zeroed.
pub fn backward(
    params: &ModelParams,
    cache: &ForwardCache,
    grad_logits: &[[f64; 2]],
) -> Result<ParamGrads, ModelError> {
    let cfg = &params.config;
    if cache.n_layers != cfg.n_layers || cache.d_model != cfg.d_model {
        return Err(ModelError::ShapeMismatch(format!(
            "cache built for {} layers / d_model {}, params have {} / {}",
            cache.n_layers, cache.d_model, cfg.n_layers, cfg.d_model
        )));
    }
    if cache.samples.len() != grad_logits.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "cache holds {} samples but {} logit gradients were given",
            cache.samples.len(),
            grad_logits.len()
        )));
    }

    let indices: Vec<usize> = (0..cache.samples.len()).collect();
    let per_sample = exec::map_slice(&indices, |i| {
        backward_sample(params, &cache.samples[*i], grad_logits[*i])
    });

    let mut grads = ParamTensors::zeros(cfg);
    for sg in &per_sample {
        for (pos, id) in sg.ids.iter().enumerate() {
            let mut row = grads.token_emb.row_mut(*id as usize);
            row += &sg.x0.row(pos);
            let mut prow = grads.pos_emb.row_mut(pos);
            prow += &sg.x0.row(pos);
        }
        for (dst, src) in grads.layers.iter_mut().zip(&sg.layers) {
            dst.wq += &src.wq;
            dst.bq += &src.bq;
            dst.wk += &src.wk;
            dst.bk += &src.bk;
            dst.wv += &src.wv;
            dst.bv += &src.bv;
            dst.wo += &src.wo;
            dst.bo += &src.bo;
            dst.w_ff1 += &src.w_ff1;
            dst.b_ff1 += &src.b_ff1;
            dst.w_ff2 += &src.w_ff2;
            dst.b_ff2 += &src.b_ff2;
            dst.ln1_gain += &src.ln1_gain;
            dst.ln1_bias += &src.ln1_bias;
            dst.ln2_gain += &src.ln2_gain;
            dst.ln2_bias += &src.ln2_bias;
        }
        grads.pool_u += &sg.pool_u;
        grads.head_w1 += &sg.head_w1;
        grads.head_b1 += &sg.head_b1;
        grads.head_w2 += &sg.head_w2;
        grads.head_b2 += &sg.head_b2;
    }
    params.zero_frozen_groups(&mut grads);
    Ok(grads)
}

fn backward_sample(params: &ModelParams, sc: &SampleCache, dlogit: [f64; 2]) -> SampleGrads {
    let cfg = &params.config;
    let t = &params.tensors;
    let n = sc.n;
    let d = cfg.d_model;
    let n_heads = cfg.n_heads;
    let dk = d / n_heads;
    let scale = 1.0 / (dk as f64).sqrt();
    let dlogit = Array1::from(vec![dlogit[0], dlogit[1]]);

    // Head.
    let head_w2 = outer(&dlogit, &sc.head_hidden);
    let head_b2 = dlogit.clone();
    let dhidden = t.head_w2.t().dot(&dlogit);
    let drelu = match &sc.drop_mask {
        Some(mask) => &dhidden * mask,
        None => dhidden,
    };
    let dpre1 = Array1::from_iter(
        drelu
            .iter()
            .zip(sc.head_pre1.iter())
            .map(|(g, pre)| if *pre > 0.0 { *g } else { 0.0 }),
    );
    let head_w1 = outer(&dpre1, &sc.h_cls);
    let head_b1 = dpre1.clone();
    let dh_cls = t.head_w1.t().dot(&dpre1);

    // Attention pooling: h_cls = sum_i alpha_i x_i, alpha = softmax(x u).
    let dalpha = sc.x_final.dot(&dh_cls);
    let mut dx = outer(&sc.pool_alpha, &dh_cls);
    let ds = softmax_vec_backward(&sc.pool_alpha, &dalpha);
    let pool_u = sc.x_final.t().dot(&ds);
    dx += &outer(&ds, &t.pool_u);

    // Encoder layers in reverse.
    let mut layer_grads: Vec<super::params::LayerTensors> = t
        .layers
        .iter()
        .map(|_| zero_layer(cfg))
        .collect();
    for l in (0..cfg.n_layers).rev() {
        let lp = &t.layers[l];
        let lc = &sc.layers[l];
        let lg = &mut layer_grads[l];

        // x_out = x_mid + ff_act . w_ff2^T + b_ff2
        let dff_out = &dx;
        lg.w_ff2 = dff_out.t().dot(&lc.ff_act);
        lg.b_ff2 = sum_rows(dff_out);
        let dff_act = dff_out.dot(&lp.w_ff2);
        let dff_pre = relu_backward(&dff_act, &lc.ff_pre);
        lg.w_ff1 = dff_pre.t().dot(&lc.f);
        lg.b_ff1 = sum_rows(&dff_pre);
        let df = dff_pre.dot(&lp.w_ff1);

        // f = xhat2 * gain2 + bias2
        lg.ln2_gain = sum_rows(&(&df * &lc.ln2.xhat));
        lg.ln2_bias = sum_rows(&df);
        let dxhat2 = &df * &lp.ln2_gain;
        let dx_mid_ln = layer_norm_backward(&dxhat2, &lc.ln2);
        let dx_mid = &dx + &dx_mid_ln;

        // x_mid = x_in + ctx . wo^T + bo
        let dattn_out = &dx_mid;
        lg.wo = dattn_out.t().dot(&lc.ctx);
        lg.bo = sum_rows(dattn_out);
        let dctx = dattn_out.dot(&lp.wo);

        let mut dq = Array2::zeros((n, d));
        let mut dkm = Array2::zeros((n, d));
        let mut dv = Array2::zeros((n, d));
        for h in 0..n_heads {
            let cols = s![.., h * dk..(h + 1) * dk];
            let qh = lc.q.slice(cols);
            let kh = lc.k.slice(cols);
            let vh = lc.v.slice(cols);
            let ah = &lc.attn[h];
            let dctx_h = dctx.slice(cols);

            let dah = dctx_h.dot(&vh.t());
            dv.slice_mut(cols).assign(&ah.t().dot(&dctx_h));
            let dscores = softmax_rows_backward(ah, &dah);
            dq.slice_mut(cols).assign(&(dscores.dot(&kh).mapv(|v| v * scale)));
            dkm.slice_mut(cols)
                .assign(&(dscores.t().dot(&qh).mapv(|v| v * scale)));
        }

        lg.wq = dq.t().dot(&lc.a);
        lg.bq = sum_rows(&dq);
        lg.wk = dkm.t().dot(&lc.a);
        lg.bk = sum_rows(&dkm);
        lg.wv = dv.t().dot(&lc.a);
        lg.bv = sum_rows(&dv);
        let da = dq.dot(&lp.wq) + dkm.dot(&lp.wk) + dv.dot(&lp.wv);

        // a = xhat1 * gain1 + bias1
        lg.ln1_gain = sum_rows(&(&da * &lc.ln1.xhat));
        lg.ln1_bias = sum_rows(&da);
        let dxhat1 = &da * &lp.ln1_gain;
        let dx_in_ln = layer_norm_backward(&dxhat1, &lc.ln1);
        dx = &dx_mid + &dx_in_ln;
    }

    SampleGrads {
        ids: sc.ids.clone(),
        x0: dx,
        layers: layer_grads,
        pool_u,
        head_w1,
        head_b1,
        head_w2,
        head_b2,
    }
}

fn zero_layer(cfg: &super::ModelConfig) -> super::params::LayerTensors {
    let d = cfg.d_model;
    let ff = cfg.d_ff;
    super::params::LayerTensors {
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

fn outer(a: &Array1<f64>, b: &Array1<f64>) -> Array2<f64> {
    let (m, n) = (a.len(), b.len());
    Array2::from_shape_fn((m, n), |(i, j)| a[i] * b[j])
}

fn sum_rows(x: &Array2<f64>) -> Array1<f64> {
    x.sum_axis(ndarray::Axis(0))
}

fn relu_backward(dy: &Array2<f64>, pre: &Array2<f64>) -> Array2<f64> {
    let mut out = dy.clone();
    out.zip_mut_with(pre, |g, p| {
        if *p <= 0.0 {
            *g = 0.0;
        }
    });
    out
}

/// Softmax Jacobian-vector product for a probability vector.
fn softmax_vec_backward(alpha: &Array1<f64>, dalpha: &Array1<f64>) -> Array1<f64> {
    let dot = alpha.dot(dalpha);
    Array1::from_iter(alpha.iter().zip(dalpha).map(|(a, g)| a * (g - dot)))
}

/// Row-wise softmax Jacobian-vector product.
fn softmax_rows_backward(a: &Array2<f64>, da: &Array2<f64>) -> Array2<f64> {
    let (n, m) = a.dim();
    let mut out = Array2::zeros((n, m));
    for i in 0..n {
        let ai = a.row(i);
        let di = da.row(i);
        let dot = ai.dot(&di);
        for j in 0..m {
            out[[i, j]] = ai[j] * (di[j] - dot);
        }
    }
    out
}

/// Backward through `xhat = (x - mean) / sqrt(var + eps)` per row.
fn layer_norm_backward(dxhat: &Array2<f64>, ln: &LnCache) -> Array2<f64> {
    let (n, d) = dxhat.dim();
    let mut out = Array2::zeros((n, d));
    for i in 0..n {
        let g = dxhat.row(i);
        let xh = ln.xhat.row(i);
        let mean_g = g.sum() / d as f64;
        let mean_gx = g.dot(&xh) / d as f64;
        let inv = ln.inv_std[i];
        for j in 0..d {
            out[[i, j]] = inv * (g[j] - mean_g - xh[j] * mean_gx);
        }
    }
    out
}
