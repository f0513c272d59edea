//! Shapley-value attribution: the exact brute-force oracle and KernelSHAP.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::masking::{mask_to_text, MaskMode};
use super::{Attribution, AttributionMeta, ExplainError, Method};
use crate::model::TextPredictor;

/// Exact Shapley costs `2^M` predictor evaluations; beyond this it is not an
/// oracle anymore.
pub const EXACT_SHAPLEY_MAX_FEATURES: usize = 15;

/// The Shapley kernel weight `(M-1) / (C(M,s) * s * (M-s))` for a coalition
/// of size `s` out of `M` features.
///
/// The endpoints `s=0` and `s=M` carry infinite weight; the constrained
/// least-squares solve pins them instead, so they are rejected here.
pub fn shapley_kernel_weight(m: usize, s: usize) -> Result<f64, ExplainError> {
    if s == 0 || s >= m {
        return Err(ExplainError::KernelEndpoint { s, m });
    }
    Ok((m as f64 - 1.0) / (choose(m, s) * s as f64 * (m - s) as f64))
}

/// Binomial coefficient as f64, computed multiplicatively with the symmetric
/// small side.
fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i) as f64;
        acc /= (i + 1) as f64;
    }
    acc
}

fn coalition_texts(tokens: &[String], masks: &[Vec<bool>], mode: &MaskMode) -> Vec<String> {
    masks
        .iter()
        .map(|mask| mask_to_text(tokens, mask, mode))
        .collect()
}

fn bitmask_to_bools(mask: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| (mask >> i) & 1 == 1).collect()
}

/// Exact Shapley values by enumeration of all `2^M` coalitions.
///
/// `phi_i = sum over S not containing i of |S|!(M-|S|-1)!/M! *
/// (v(S + i) - v(S))` with `v` the predictor on the realized coalition text.
/// Marginal contributions are accumulated per coalition size first and only
/// then multiplied by the (irrational) size weight, which keeps the dummy and
/// symmetry axioms exact in floating point for integer-valued games.
pub fn exact_shapley<P: TextPredictor + ?Sized>(
    predictor: &P,
    tokens: &[String],
    mode: &MaskMode,
) -> Result<Attribution, ExplainError> {
    let m = tokens.len();
    if m == 0 {
        return Err(ExplainError::NoTokens);
    }
    if m > EXACT_SHAPLEY_MAX_FEATURES {
        return Err(ExplainError::TooManyFeatures {
            got: m,
            max: EXACT_SHAPLEY_MAX_FEATURES,
        });
    }

    let n_masks = 1usize << m;
    let masks: Vec<Vec<bool>> = (0..n_masks).map(|b| bitmask_to_bools(b, m)).collect();
    let v = predictor.predict_fake(&coalition_texts(tokens, &masks, mode))?;

    let mut scores = Vec::with_capacity(m);
    for i in 0..m {
        let bit = 1usize << i;
        let mut sums_by_size = vec![0.0; m];
        for mask in 0..n_masks {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            sums_by_size[s] += v[mask | bit] - v[mask];
        }
        let phi: f64 = sums_by_size
            .iter()
            .enumerate()
            .map(|(s, sum)| sum / (m as f64 * choose(m - 1, s)))
            .sum();
        scores.push(phi);
    }

    Ok(Attribution {
        method: Method::ExactShapley,
        tokens: tokens.to_vec(),
        scores,
        base_value: v[0],
        meta: AttributionMeta {
            n_samples: n_masks,
            kernel_width: 0.0,
            ridge_lambda: 0.0,
            seed: 0,
        },
    })
}

/// Coalition budget for [`kernel_shap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalitionBudget {
    /// Enumerate all `2^M - 2` proper coalitions with Shapley kernel
    /// weights; the result equals exact Shapley values.
    Exhaustive,
    /// Sample this many coalitions from the kernel distribution over sizes.
    Sampled { n_coalitions: usize },
}

/// KernelSHAP: Shapley-kernel-weighted least squares with the efficiency
/// constraint `sum(phi) = v(full) - v(empty)` enforced by eliminating the
/// last feature's coefficient.
///
/// In sampled mode coalition sizes are drawn proportional to
/// `kernel(s) * C(M,s)`, i.e. the kernel mass of each size, and members
/// uniformly within the size; sampled rows then enter the solve with unit
/// weight. Deterministic given the seed.
pub fn kernel_shap<P: TextPredictor + ?Sized>(
    predictor: &P,
    tokens: &[String],
    mode: &MaskMode,
    budget: CoalitionBudget,
    seed: u64,
) -> Result<Attribution, ExplainError> {
    let m = tokens.len();
    if m < 2 {
        return Err(ExplainError::TooFewFeatures { got: m });
    }

    let (masks, weights) = match budget {
        CoalitionBudget::Exhaustive => {
            let full = (1usize << m) - 1;
            let mut masks = Vec::with_capacity(full - 1);
            let mut weights = Vec::with_capacity(full - 1);
            for bits in 1..full {
                masks.push(bitmask_to_bools(bits, m));
                weights.push(shapley_kernel_weight(m, bits.count_ones() as usize)?);
            }
            (masks, weights)
        }
        CoalitionBudget::Sampled { n_coalitions } => {
            if n_coalitions < m + 2 {
                return Err(ExplainError::TooFewSamples {
                    needed: m + 2,
                    got: n_coalitions,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Kernel mass per size: kernel(s) * C(M,s) = (M-1)/(s(M-s)).
            let size_mass: Vec<f64> = (1..m)
                .map(|s| (m as f64 - 1.0) / ((s * (m - s)) as f64))
                .collect();
            let total_mass: f64 = size_mass.iter().sum();
            let mut masks = Vec::with_capacity(n_coalitions);
            for _ in 0..n_coalitions {
                let mut draw = rng.random::<f64>() * total_mass;
                let mut size = 1;
                for (s_idx, mass) in size_mass.iter().enumerate() {
                    if draw < *mass {
                        size = s_idx + 1;
                        break;
                    }
                    draw -= mass;
                    size = s_idx + 1;
                }
                // Partial Fisher-Yates: first `size` entries form the subset.
                let mut positions: Vec<usize> = (0..m).collect();
                for i in 0..size {
                    let j = rng.random_range(i..m);
                    positions.swap(i, j);
                }
                let mut mask = vec![false; m];
                for &p in &positions[..size] {
                    mask[p] = true;
                }
                masks.push(mask);
            }
            let weights = vec![1.0; masks.len()];
            (masks, weights)
        }
    };

    // One batch: empty, full, then every coalition.
    let mut all_masks = Vec::with_capacity(masks.len() + 2);
    all_masks.push(vec![false; m]);
    all_masks.push(vec![true; m]);
    all_masks.extend(masks.iter().cloned());
    let preds = predictor.predict_fake(&coalition_texts(tokens, &all_masks, mode))?;
    let v_empty = preds[0];
    let v_full = preds[1];
    let v = &preds[2..];
    let span = v_full - v_empty;

    // Eliminate phi_{M-1}: regress y_j = v_j - v_empty - z_{M-1} * span on
    // columns (z_i - z_{M-1}), i < M-1.
    let p = m - 1;
    let mut xtwx = DMatrix::<f64>::zeros(p, p);
    let mut xtwy = DVector::<f64>::zeros(p);
    let mut row = vec![0.0; p];
    for (j, mask) in masks.iter().enumerate() {
        let z_last = f64::from(mask[m - 1]);
        for i in 0..p {
            row[i] = f64::from(mask[i]) - z_last;
        }
        let y = v[j] - v_empty - z_last * span;
        let w = weights[j];
        for a in 0..p {
            let wa = w * row[a];
            if wa == 0.0 {
                continue;
            }
            for b in 0..p {
                xtwx[(a, b)] += wa * row[b];
            }
            xtwy[a] += wa * y;
        }
    }
    let phi_head = xtwx.lu().solve(&xtwy).ok_or(ExplainError::SingularSystem)?;

    let mut scores: Vec<f64> = phi_head.iter().copied().collect();
    let phi_last = span - scores.iter().sum::<f64>();
    scores.push(phi_last);

    Ok(Attribution {
        method: Method::KernelShap,
        tokens: tokens.to_vec(),
        scores,
        base_value: v_empty,
        meta: AttributionMeta {
            n_samples: all_masks.len(),
            kernel_width: 0.0,
            ridge_lambda: 0.0,
            seed,
        },
    })
}
