//! Compute-efficiency measurement: parameter counts, training time per
//! epoch, inference latency and throughput.
//!
//! Timings use the monotonic clock. Whether latency should include
//! tokenization is a judgment call, so both modes exist and every report row
//! is labeled with the mode that produced it.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{clean_text, encode_text, TokenizedInput, Vocab};
use crate::model::{forward, ForwardMode, GroupId, ModelError, ModelParams, ParamTensors};
use crate::trainer::TrainLog;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("training log has no epoch records")]
    EmptyLog,
    #[error("benchmark dataset is empty")]
    EmptyDataset,
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Whether the timed region includes text cleaning and tokenization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingMode {
    InferenceOnly,
    EndToEnd,
}

impl TimingMode {
    pub fn label(self) -> &'static str {
        match self {
            TimingMode::InferenceOnly => "inference_only",
            TimingMode::EndToEnd => "end_to_end",
        }
    }
}

/// One efficiency-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub model: String,
    pub params_count: u64,
    pub params_millions: f64,
    pub train_time_per_epoch_s: f64,
    pub latency_ms_per_sample: f64,
    pub throughput_samples_per_s: f64,
    pub n_eval_samples: usize,
    pub warmup_batches: usize,
    pub timing_mode: TimingMode,
    pub hardware_note: String,
}

/// Exact number of scalar parameters across all tensors.
pub fn count_params(params: &ModelParams) -> u64 {
    params
        .tensors
        .flat_views()
        .iter()
        .map(|s| s.len() as u64)
        .sum()
}

/// Parameter count of a single freeze group.
pub fn count_group_params(params: &ModelParams, group: GroupId) -> u64 {
    let meta = ParamTensors::tensor_meta(params.config.n_layers);
    params
        .tensors
        .flat_views()
        .iter()
        .zip(meta)
        .filter(|(_, m)| m.group == group)
        .map(|(s, _)| s.len() as u64)
        .sum()
}

pub fn params_in_millions(count: u64) -> f64 {
    (count as f64 / 1e6 * 100.0).round() / 100.0
}

/// Arithmetic mean of per-epoch wall-clock seconds from a training log.
pub fn time_training_epochs(log: &TrainLog) -> Result<f64, BenchError> {
    if log.records.is_empty() {
        return Err(BenchError::EmptyLog);
    }
    let total: f64 = log.records.iter().map(|r| r.seconds).sum();
    Ok(total / log.records.len() as f64)
}

/// Latency (ms/sample) and throughput (samples/s) from a timed total.
/// This is the same arithmetic `measure_inference` applies to its own timer.
pub fn rates_from_totals(n_samples: usize, total_seconds: f64) -> (f64, f64) {
    let latency_ms = total_seconds * 1000.0 / n_samples as f64;
    let throughput = n_samples as f64 / total_seconds;
    (latency_ms, throughput)
}

/// Measured latency and throughput of one full pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceTiming {
    pub latency_ms_per_sample: f64,
    pub throughput_samples_per_s: f64,
    pub n_samples: usize,
    pub total_seconds: f64,
}

/// Time one full pass over `texts` in batches, after running
/// `warmup_batches` untimed batches.
///
/// `InferenceOnly` tokenizes up front and times the forward passes;
/// `EndToEnd` times cleaning + encoding + forward together.
pub fn measure_inference(
    params: &ModelParams,
    vocab: &Vocab,
    texts: &[String],
    batch_size: usize,
    warmup_batches: usize,
    mode: TimingMode,
) -> Result<InferenceTiming, BenchError> {
    if texts.is_empty() {
        return Err(BenchError::EmptyDataset);
    }
    assert!(batch_size >= 1, "batch_size must be >= 1");
    let max_len = params.config.max_len;
    let encode_all = |texts: &[String]| -> Vec<TokenizedInput> {
        texts
            .iter()
            .map(|t| encode_text(&clean_text(t), vocab, max_len))
            .collect()
    };

    match mode {
        TimingMode::InferenceOnly => {
            let encoded = encode_all(texts);
            for batch in encoded.chunks(batch_size).take(warmup_batches) {
                forward(params, batch, ForwardMode::Eval)?;
            }
            let start = Instant::now();
            for batch in encoded.chunks(batch_size) {
                forward(params, batch, ForwardMode::Eval)?;
            }
            let total = start.elapsed().as_secs_f64();
            let (latency_ms_per_sample, throughput_samples_per_s) =
                rates_from_totals(texts.len(), total);
            Ok(InferenceTiming {
                latency_ms_per_sample,
                throughput_samples_per_s,
                n_samples: texts.len(),
                total_seconds: total,
            })
        }
        TimingMode::EndToEnd => {
            for batch in texts.chunks(batch_size).take(warmup_batches) {
                forward(params, &encode_all(batch), ForwardMode::Eval)?;
            }
            let start = Instant::now();
            for batch in texts.chunks(batch_size) {
                forward(params, &encode_all(batch), ForwardMode::Eval)?;
            }
            let total = start.elapsed().as_secs_f64();
            let (latency_ms_per_sample, throughput_samples_per_s) =
                rates_from_totals(texts.len(), total);
            Ok(InferenceTiming {
                latency_ms_per_sample,
                throughput_samples_per_s,
                n_samples: texts.len(),
                total_seconds: total,
            })
        }
    }
}

/// Write reports as JSON plus an aligned text table (rows sorted by model
/// name, then timing mode). Column order: model, params, train time/epoch,
/// latency, throughput, then the mode label.
pub fn emit_efficiency_report(
    reports: &[EfficiencyReport],
    json_path: &Path,
    text_path: &Path,
) -> Result<(), BenchError> {
    let mut rows = reports.to_vec();
    rows.sort_by(|a, b| {
        a.model
            .cmp(&b.model)
            .then_with(|| a.timing_mode.label().cmp(b.timing_mode.label()))
    });

    let json = serde_json::to_string_pretty(&rows).expect("reports serialize");
    std::fs::write(json_path, json).map_err(|source| BenchError::Io {
        path: json_path.display().to_string(),
        source,
    })?;

    let header = [
        "Model",
        "Params (M)",
        "Train Time/Epoch (s)",
        "Latency (ms/sample)",
        "Throughput (samples/s)",
        "Mode",
    ];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                format!("{:.2}", r.params_millions),
                format!("{:.2}", r.train_time_per_epoch_s),
                format!("{:.2}", r.latency_ms_per_sample),
                format!("{:.2}", r.throughput_samples_per_s),
                r.timing_mode.label().to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut text = String::new();
    let fmt_row = |cols: &[String], widths: &[usize]| -> String {
        cols.iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header_cells: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    text.push_str(&fmt_row(&header_cells, &widths));
    text.push('\n');
    text.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    text.push('\n');
    for row in &cells {
        text.push_str(&fmt_row(row, &widths));
        text.push('\n');
    }
    std::fs::write(text_path, text).map_err(|source| BenchError::Io {
        path: text_path.display().to_string(),
        source,
    })
}

/// Read back the machine-readable efficiency report.
pub fn read_efficiency_report(json_path: &Path) -> Result<Vec<EfficiencyReport>, BenchError> {
    let content = std::fs::read_to_string(json_path).map_err(|source| BenchError::Io {
        path: json_path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&content).map_err(|source| BenchError::Parse {
        path: json_path.display().to_string(),
        source,
    })
}
