//! `verdict ingest`: build or load the corpus, clean it, split it, write the
//! cleaned dataset and the split manifest.

use std::path::Path;

use verdict_core::corpus::{
    generate_synthetic, load_csv, stratified_split, write_clean_csv, write_split_manifest,
    CsvSchema, SplitSpec,
};
use verdict_core::seed::derive_seed;

use super::class_counts;
use crate::config::{OutPaths, RunConfig};
use crate::CliError;

pub fn cmd_ingest(cfg: &RunConfig, paths: &OutPaths) -> Result<(), CliError> {
    std::fs::create_dir_all(&paths.dir)
        .map_err(|e| CliError::general(format!("cannot create {}: {e}", paths.dir.display())))?;

    let docs = match cfg.corpus.source.as_str() {
        "synthetic" => {
            if cfg.corpus.n_per_class < 1 {
                return Err(CliError::new(2, "n_per_class must be >= 1"));
            }
            generate_synthetic(
                cfg.corpus.n_per_class,
                derive_seed(cfg.seed, "corpus.synthetic"),
            )
        }
        "csv" => {
            let schema = CsvSchema {
                id_column: cfg.corpus.id_column.clone(),
                text_column: cfg.corpus.text_column.clone(),
                label_column: cfg.corpus.label_column.clone(),
            };
            load_csv(Path::new(&cfg.corpus.csv_path), &schema)
                .map_err(|e| CliError::new(2, e.to_string()))?
        }
        other => {
            return Err(CliError::new(
                2,
                format!("unknown corpus source '{other}' (expected 'synthetic' or 'csv')"),
            ))
        }
    };

    let spec = SplitSpec::new(
        cfg.corpus.train_fraction,
        cfg.validation_fraction(),
        cfg.corpus.test_fraction,
        derive_seed(cfg.seed, "split"),
    );
    let split = stratified_split(&docs, &spec).map_err(|e| CliError::new(2, e.to_string()))?;

    write_clean_csv(&paths.cleaned_csv(), &docs)
        .map_err(|e| CliError::new(2, e.to_string()))?;
    write_split_manifest(&paths.split_manifest(), &split)
        .map_err(|e| CliError::new(2, e.to_string()))?;

    println!("Dataset summary ({} documents)", docs.len());
    println!("{:<12} {:>8} {:>8} {:>8}", "Split", "Real", "Fake", "Total");
    let mut emit = |name: &str, docs: &[verdict_core::corpus::Document]| {
        let (real, fake) = class_counts(docs);
        println!("{name:<12} {real:>8} {fake:>8} {:>8}", real + fake);
    };
    emit("train", &split.train);
    if let Some(val) = &split.validation {
        emit("validation", val);
    }
    emit("test", &split.test);
    println!(
        "wrote {} and {}",
        paths.cleaned_csv().display(),
        paths.split_manifest().display()
    );
    Ok(())
}
