//! CSV ingestion and the cleaned-dataset / split-manifest files.
//!
//! Input: UTF-8, comma-separated, double-quote escaped, header row with an
//! optional id column plus text and label columns. Label strings map
//! case-insensitively: `real`/`0` to Real, `fake`/`1` to Fake.

use std::path::Path;

use super::{CorpusError, Document, Label, SplitDocs};

/// Column names to look for in the CSV header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub id_column: String,
    pub text_column: String,
    pub label_column: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            id_column: "id".to_string(),
            text_column: "text".to_string(),
            label_column: "label".to_string(),
        }
    }
}

fn parse_label(raw: &str, row: usize) -> Result<Label, CorpusError> {
    match raw.trim().to_lowercase().as_str() {
        "real" | "0" => Ok(Label::Real),
        "fake" | "1" => Ok(Label::Fake),
        _ => Err(CorpusError::UnknownLabel(raw.to_string(), row)),
    }
}

fn wrap_csv_error(path: &Path, row: usize, e: csv::Error) -> CorpusError {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(source) = e.into_kind() {
            return CorpusError::Io {
                path: path.display().to_string(),
                source,
            };
        }
        unreachable!("is_io_error matched a non-io kind");
    }
    CorpusError::MalformedRow {
        row,
        detail: e.to_string(),
    }
}

/// Load one document per data row. Row numbers in errors are 1-based over
/// data rows (the header is row 0). When the id column is absent the row
/// number becomes the id.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<Vec<Document>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| wrap_csv_error(path, 0, e))?;

    let headers = reader
        .headers()
        .map_err(|e| wrap_csv_error(path, 0, e))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let id_idx = find(&schema.id_column);
    let text_idx = find(&schema.text_column)
        .ok_or_else(|| CorpusError::MissingColumn(schema.text_column.clone()))?;
    let label_idx = find(&schema.label_column)
        .ok_or_else(|| CorpusError::MissingColumn(schema.label_column.clone()))?;

    let mut docs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| wrap_csv_error(path, row, e))?;
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let label = parse_label(field(label_idx), row)?;
        let id = id_idx
            .map(|idx| field(idx).to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| row.to_string());
        docs.push(Document::new(id, field(text_idx), label));
    }
    Ok(docs)
}

/// Write documents as a cleaned CSV (`id,text,label`) where `text` is the
/// cleaned text. The file reloads through [`load_csv`] unchanged.
pub fn write_clean_csv(path: &Path, docs: &[Document]) -> Result<(), CorpusError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| wrap_csv_error(path, 0, e))?;
    writer
        .write_record(["id", "text", "label"])
        .map_err(|e| wrap_csv_error(path, 0, e))?;
    for d in docs {
        writer
            .write_record([d.id.as_str(), d.clean_text.as_str(), d.label.name()])
            .map_err(|e| wrap_csv_error(path, 0, e))?;
    }
    writer.flush().map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write the `(id, split)` manifest for a stratified split.
pub fn write_split_manifest(path: &Path, split: &SplitDocs) -> Result<(), CorpusError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| wrap_csv_error(path, 0, e))?;
    writer
        .write_record(["id", "split"])
        .map_err(|e| wrap_csv_error(path, 0, e))?;
    let mut emit = |docs: &[Document], name: &str| -> Result<(), CorpusError> {
        for d in docs {
            writer
                .write_record([d.id.as_str(), name])
                .map_err(|e| wrap_csv_error(path, 0, e))?;
        }
        Ok(())
    };
    emit(&split.train, "train")?;
    if let Some(val) = &split.validation {
        emit(val, "validation")?;
    }
    emit(&split.test, "test")?;
    writer.flush().map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}
