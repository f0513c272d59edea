//! `verdict evaluate`: score the test split and print the comparison-table
//! row (Precision, Recall, F1-Score, AUROC).

use verdict_core::metrics::{evaluate, MetricsError, MetricsReport};
use verdict_core::model::{Checkpoint, ModelPredictor, TfidfLogReg};

use super::load_dataset;
use crate::config::{OutPaths, RunConfig};
use crate::CliError;

pub fn cmd_evaluate(
    cfg: &RunConfig,
    paths: &OutPaths,
    baseline: bool,
    tau_override: Option<f64>,
) -> Result<(), CliError> {
    let dataset = load_dataset(paths)?;
    if dataset.test.is_empty() {
        return Err(CliError::new(4, "test split is empty"));
    }
    let dc = cfg.decision_config(tau_override);
    dc.validate().map_err(|e| CliError::general(e.to_string()))?;

    let (model_name, report) = if baseline {
        let content = std::fs::read_to_string(paths.baseline_model()).map_err(|e| {
            CliError::general(format!(
                "cannot read {}; run `verdict train --baseline` first: {e}",
                paths.baseline_model().display()
            ))
        })?;
        let model: TfidfLogReg = serde_json::from_str(&content)
            .map_err(|e| CliError::general(format!("corrupt baseline model: {e}")))?;
        (
            "tfidf-logreg",
            run_evaluate(&model, &dataset.test, dc.tau)?,
        )
    } else {
        let ckpt = Checkpoint::load(&paths.checkpoint_best())
            .map_err(|e| CliError::general(e.to_string()))?;
        let predictor = ModelPredictor::new(&ckpt.params, &ckpt.vocab);
        (
            "transformer",
            run_evaluate(&predictor, &dataset.test, dc.tau)?,
        )
    };

    let out = paths.metrics(baseline);
    std::fs::write(
        &out,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )
    .map_err(|e| CliError::general(format!("writing metrics: {e}")))?;

    println!(
        "{:<16} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "Model", "Precision", "Recall", "F1-Score", "AUROC", "Accuracy"
    );
    println!(
        "{:<16} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
        model_name, report.precision, report.recall, report.f1, report.auroc, report.accuracy
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn run_evaluate<P: verdict_core::model::TextPredictor + ?Sized>(
    predictor: &P,
    docs: &[verdict_core::corpus::Document],
    tau: f64,
) -> Result<MetricsReport, CliError> {
    evaluate(predictor, docs, tau).map_err(|e| match e {
        MetricsError::SingleClass => CliError::new(4, e.to_string()),
        other => CliError::general(other.to_string()),
    })
}
