//! `verdict bench`: efficiency measurement over the trained checkpoint.

use verdict_core::bench::{
    count_params, emit_efficiency_report, measure_inference, params_in_millions,
    time_training_epochs, EfficiencyReport, TimingMode,
};
use verdict_core::model::Checkpoint;
use verdict_core::trainer::TrainLog;

use super::load_dataset;
use crate::config::{OutPaths, RunConfig};
use crate::CliError;

pub fn cmd_bench(cfg: &RunConfig, paths: &OutPaths, modes: &[TimingMode]) -> Result<(), CliError> {
    let ckpt = Checkpoint::load(&paths.checkpoint_best())
        .map_err(|e| CliError::general(e.to_string()))?;
    let dataset = load_dataset(paths)?;
    let texts: Vec<String> = dataset
        .test
        .iter()
        .map(|d| d.clean_text.clone())
        .collect();

    let log = TrainLog::read_jsonl(&paths.train_log())
        .map_err(|e| CliError::general(format!("reading train log: {e}")))?;
    let train_time = time_training_epochs(&log).map_err(|e| CliError::new(6, e.to_string()))?;

    let n_params = count_params(&ckpt.params);
    let mut reports = Vec::new();
    for mode in modes {
        let timing = measure_inference(
            &ckpt.params,
            &ckpt.vocab,
            &texts,
            cfg.bench.batch_size,
            cfg.bench.warmup_batches,
            *mode,
        )
        .map_err(|e| CliError::new(6, e.to_string()))?;
        reports.push(EfficiencyReport {
            model: "transformer".to_string(),
            params_count: n_params,
            params_millions: params_in_millions(n_params),
            train_time_per_epoch_s: train_time,
            latency_ms_per_sample: timing.latency_ms_per_sample,
            throughput_samples_per_s: timing.throughput_samples_per_s,
            n_eval_samples: timing.n_samples,
            warmup_batches: cfg.bench.warmup_batches,
            timing_mode: *mode,
            hardware_note: cfg.bench.hardware_note.clone(),
        });
    }

    emit_efficiency_report(&reports, &paths.efficiency_json(), &paths.efficiency_text())
        .map_err(|e| CliError::new(6, e.to_string()))?;
    let table = std::fs::read_to_string(paths.efficiency_text())
        .map_err(|e| CliError::general(e.to_string()))?;
    print!("{table}");
    println!(
        "wrote {} and {}",
        paths.efficiency_json().display(),
        paths.efficiency_text().display()
    );
    Ok(())
}
