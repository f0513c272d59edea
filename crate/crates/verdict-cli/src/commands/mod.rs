//! Subcommand implementations.

mod bench;
mod evaluate;
mod explain;
mod ingest;
mod train;

pub use bench::cmd_bench;
pub use evaluate::cmd_evaluate;
pub use explain::cmd_explain;
pub use ingest::cmd_ingest;
pub use train::cmd_train;

use std::collections::HashMap;
use std::path::Path;

use verdict_core::corpus::{load_csv, CsvSchema, Document, Label};

use crate::config::OutPaths;
use crate::CliError;

/// The ingested dataset re-assembled from `cleaned.csv` + `splits.csv`.
pub struct Dataset {
    pub train: Vec<Document>,
    pub validation: Vec<Document>,
    pub test: Vec<Document>,
}

/// Load the artifacts `cmd_ingest` wrote. The cleaned CSV is already
/// normalized, and cleaning is idempotent, so reloading through the standard
/// reader reproduces the documents exactly.
pub fn load_dataset(paths: &OutPaths) -> Result<Dataset, CliError> {
    let cleaned = paths.cleaned_csv();
    let manifest = paths.split_manifest();
    for p in [&cleaned, &manifest] {
        if !p.exists() {
            return Err(CliError::general(format!(
                "{} not found; run `verdict ingest` first",
                p.display()
            )));
        }
    }
    let docs = load_csv(&cleaned, &CsvSchema::default())
        .map_err(|e| CliError::new(2, e.to_string()))?;
    let assignment = read_split_manifest(&manifest)?;

    let mut dataset = Dataset {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for doc in docs {
        match assignment.get(&doc.id).map(String::as_str) {
            Some("train") => dataset.train.push(doc),
            Some("validation") => dataset.validation.push(doc),
            Some("test") => dataset.test.push(doc),
            Some(other) => {
                return Err(CliError::new(
                    2,
                    format!("unknown split '{other}' for document {}", doc.id),
                ))
            }
            None => {
                return Err(CliError::new(
                    2,
                    format!("document {} missing from split manifest", doc.id),
                ))
            }
        }
    }
    Ok(dataset)
}

fn read_split_manifest(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::new(2, format!("cannot read {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for record in reader.records() {
        let record =
            record.map_err(|e| CliError::new(2, format!("bad manifest row: {e}")))?;
        let id = record.get(0).unwrap_or("").to_string();
        let split = record.get(1).unwrap_or("").to_string();
        map.insert(id, split);
    }
    Ok(map)
}

pub(crate) fn class_counts(docs: &[Document]) -> (usize, usize) {
    let fake = docs.iter().filter(|d| d.label == Label::Fake).count();
    (docs.len() - fake, fake)
}
