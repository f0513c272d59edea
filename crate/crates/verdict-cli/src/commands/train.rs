//! `verdict train`: the two-phase curriculum over the ingested splits, or
//! the TF-IDF + logistic-regression baseline with `--baseline`.

use verdict_core::corpus::{build_vocab, encode, Document, Vocab};
use verdict_core::model::{
    init_params, train_tfidf_logreg, BaselineConfig, Checkpoint,
};
use verdict_core::trainer::{train_phase1, train_phase2, TrainLog, TrainSample};

use super::load_dataset;
use crate::config::{OutPaths, RunConfig};
use crate::CliError;

fn encode_split(docs: &[Document], vocab: &Vocab, max_len: usize) -> Vec<TrainSample> {
    docs.iter()
        .map(|d| TrainSample {
            input: encode(d, vocab, max_len),
            label: d.label,
        })
        .collect()
}

pub fn cmd_train(cfg: &RunConfig, paths: &OutPaths, baseline: bool) -> Result<(), CliError> {
    let dataset = load_dataset(paths)?;
    if baseline {
        return train_baseline(cfg, paths, &dataset.train);
    }

    let vocab = build_vocab(&dataset.train, cfg.corpus.min_freq, cfg.corpus.max_vocab)
        .map_err(|e| CliError::new(3, e.to_string()))?;
    let model_cfg = cfg.model_config(vocab.len());
    let mut params = init_params(&model_cfg).map_err(|e| CliError::new(3, e.to_string()))?;
    let plan = cfg.train_plan();

    let train_samples = encode_split(&dataset.train, &vocab, model_cfg.max_len);
    let val_samples = encode_split(&dataset.validation, &vocab, model_cfg.max_len);
    let val = if val_samples.is_empty() {
        None
    } else {
        Some(val_samples.as_slice())
    };

    println!(
        "training on {} samples ({} validation), vocab {}",
        train_samples.len(),
        val_samples.len(),
        vocab.len()
    );

    let log1 = train_phase1(&mut params, &plan, &train_samples, val)
        .map_err(|e| CliError::new(3, e.to_string()))?;
    print_records(&log1);
    let outcome = train_phase2(&mut params, &plan, &train_samples, val)
        .map_err(|e| CliError::new(3, e.to_string()))?;
    print_records(&outcome.log);
    println!("best checkpoint from epoch {}", outcome.restored_epoch);

    let mut log = TrainLog::default();
    log.records.extend(log1.records);
    log.records.extend(outcome.log.records.clone());
    log.write_jsonl(&paths.train_log())
        .map_err(|e| CliError::general(format!("writing train log: {e}")))?;

    Checkpoint::new(params, vocab.clone())
        .save(&paths.checkpoint_best())
        .map_err(|e| CliError::general(e.to_string()))?;
    Checkpoint::new(outcome.final_params, vocab)
        .save(&paths.checkpoint_final())
        .map_err(|e| CliError::general(e.to_string()))?;
    println!(
        "wrote {}, {} and {}",
        paths.checkpoint_best().display(),
        paths.checkpoint_final().display(),
        paths.train_log().display()
    );
    Ok(())
}

fn print_records(log: &TrainLog) {
    for r in &log.records {
        let val = r
            .val_f1
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "epoch {:>3} phase {} loss {:.4} val_f1 {} frozen [{}] ({:.2}s)",
            r.epoch,
            r.phase,
            r.loss,
            val,
            r.frozen.join(","),
            r.seconds
        );
    }
}

fn train_baseline(cfg: &RunConfig, paths: &OutPaths, train: &[Document]) -> Result<(), CliError> {
    let baseline_cfg = BaselineConfig {
        l2: cfg.baseline.l2,
        epochs: cfg.baseline.epochs,
        lr: cfg.baseline.lr,
    };
    let model = train_tfidf_logreg(train, &baseline_cfg)
        .map_err(|e| CliError::new(3, e.to_string()))?;
    let json = serde_json::to_string_pretty(&model).expect("baseline serializes");
    std::fs::write(paths.baseline_model(), json)
        .map_err(|e| CliError::general(format!("writing baseline model: {e}")))?;
    println!(
        "trained tfidf-logreg baseline on {} documents ({} features); wrote {}",
        train.len(),
        model.vocab_len(),
        paths.baseline_model().display()
    );
    Ok(())
}
