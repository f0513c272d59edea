//! `verdict explain`: run the requested explainers on one text and render
//! the side-by-side comparison report.

use verdict_core::corpus::clean_text;
use verdict_core::explain::{
    compare_attributions, exact_shapley, kernel_shap, lime_explain, Attribution,
    AttributionComparison, CoalitionBudget, LimeConfig, MaskMode,
};
use verdict_core::model::{Checkpoint, ModelPredictor};
use verdict_core::seed::derive_seed;

use crate::config::{OutPaths, RunConfig};
use crate::report::render_explanation_html;
use crate::CliError;

/// Exact Shapley from the CLI is capped below the library bound: `2^M`
/// forward passes of the real model per explanation.
const CLI_EXACT_MAX_TOKENS: usize = 12;

pub fn cmd_explain(
    cfg: &RunConfig,
    paths: &OutPaths,
    text: &str,
    methods: &str,
    exact: bool,
) -> Result<(), CliError> {
    let cleaned = clean_text(text);
    if cleaned.split_whitespace().next().is_none() {
        return Err(CliError::new(5, "text cleans to empty; nothing to explain"));
    }
    let tokens: Vec<String> = cleaned.split_whitespace().map(str::to_string).collect();
    let m = tokens.len();

    let ckpt = Checkpoint::load(&paths.checkpoint_best())
        .map_err(|e| CliError::general(e.to_string()))?;
    let predictor = ModelPredictor::new(&ckpt.params, &ckpt.vocab);

    let shap_mode = match cfg.explain.shap_mask.as_str() {
        "replace" => MaskMode::Replace(ckpt.vocab.oov_token()),
        "delete" => MaskMode::Delete,
        other => {
            return Err(CliError::general(format!(
                "unknown shap_mask '{other}' (expected 'replace' or 'delete')"
            )))
        }
    };

    let mut attributions: Vec<Attribution> = Vec::new();
    for method in methods.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match method {
            "lime" => {
                let lime_cfg = LimeConfig {
                    n_samples: cfg.explain.n_samples.max(m + 1),
                    kernel_width: cfg.explain.kernel_width,
                    ridge_lambda: cfg.explain.ridge_lambda,
                    top_k: match cfg.explain.top_k {
                        0 => None,
                        k => Some(k),
                    },
                    seed: derive_seed(cfg.seed, "explain.lime"),
                };
                let attr = lime_explain(&predictor, &cleaned, &lime_cfg)
                    .map_err(|e| CliError::general(e.to_string()))?;
                attributions.push(attr);
            }
            "shap" => {
                let budget = if m <= cfg.explain.exhaustive_max_tokens {
                    CoalitionBudget::Exhaustive
                } else {
                    CoalitionBudget::Sampled {
                        n_coalitions: cfg.explain.n_coalitions,
                    }
                };
                let attr = kernel_shap(
                    &predictor,
                    &tokens,
                    &shap_mode,
                    budget,
                    derive_seed(cfg.seed, "explain.shap"),
                )
                .map_err(|e| CliError::general(e.to_string()))?;
                attributions.push(attr);
            }
            other => {
                return Err(CliError::general(format!(
                    "unknown method '{other}' (expected 'lime' and/or 'shap')"
                )))
            }
        }
    }

    if exact {
        if m > CLI_EXACT_MAX_TOKENS {
            return Err(CliError::general(format!(
                "--exact is limited to {CLI_EXACT_MAX_TOKENS} tokens (got {m}); \
                 the exact oracle costs 2^M model evaluations"
            )));
        }
        let attr = exact_shapley(&predictor, &tokens, &shap_mode)
            .map_err(|e| CliError::general(e.to_string()))?;
        attributions.push(attr);
    }

    if attributions.is_empty() {
        return Err(CliError::general("no explainers requested"));
    }

    std::fs::create_dir_all(&paths.dir)
        .map_err(|e| CliError::general(format!("cannot create {}: {e}", paths.dir.display())))?;
    for attr in &attributions {
        let path = paths.attribution(&attr.method.label().to_lowercase());
        attr.write_json(&path)
            .map_err(|e| CliError::general(format!("writing {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }

    let k = if cfg.explain.top_k == 0 {
        5.min(m)
    } else {
        cfg.explain.top_k.min(m)
    };
    let mut comparisons: Vec<AttributionComparison> = Vec::new();
    for i in 0..attributions.len() {
        for j in i + 1..attributions.len() {
            let cmp = compare_attributions(&attributions[i], &attributions[j], k)
                .map_err(|e| CliError::general(e.to_string()))?;
            println!(
                "{} vs {}: jaccard {:.3}, sign agreement {:.3}, rank correlation {:.3}",
                cmp.method_a, cmp.method_b, cmp.jaccard, cmp.sign_agreement, cmp.rank_correlation
            );
            comparisons.push(cmp);
        }
    }
    if !comparisons.is_empty() {
        std::fs::write(
            paths.comparison(),
            serde_json::to_string_pretty(&comparisons).expect("comparison serializes"),
        )
        .map_err(|e| CliError::general(format!("writing comparison: {e}")))?;
        println!("wrote {}", paths.comparison().display());
    }

    let html = render_explanation_html(&cleaned, &attributions, &comparisons);
    std::fs::write(paths.explanation_html(), html)
        .map_err(|e| CliError::general(format!("writing report: {e}")))?;
    println!("wrote {}", paths.explanation_html().display());
    Ok(())
}
