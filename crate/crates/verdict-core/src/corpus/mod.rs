//! Dataset ingestion, cleaning, vocabulary, tokenization and splitting.

mod clean;
mod csv_io;
mod split;
mod synthetic;
mod vocab;

pub use clean::clean_text;
pub use csv_io::{load_csv, write_clean_csv, write_split_manifest, CsvSchema};
pub use split::{stratified_split, SplitDocs, SplitSpec};
pub use synthetic::{generate_synthetic, FAKE_CUES, FILLER, REAL_CUES};
pub use vocab::{build_vocab, encode, encode_text, Vocab, PAD_ID, UNK_ID};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("document collection is empty")]
    EmptyCorpus,
    #[error("min_freq must be >= 1 (got {0})")]
    InvalidMinFreq(usize),
    #[error("max_size must be >= 2 to fit the reserved PAD/UNK tokens (got {0})")]
    InvalidMaxSize(usize),
    #[error("split fractions must each lie in (0,1) and sum to 1 (got {0:?})")]
    InvalidFractions(Vec<f64>),
    #[error("class {0:?} has {1} documents; at least 2 are required to populate train and test")]
    DegenerateClass(Label, usize),
    #[error("class {0:?} would receive 0 documents in the {1} split")]
    EmptySplit(Label, &'static str),
    #[error("column '{0}' not found in CSV header")]
    MissingColumn(String),
    #[error("unknown label '{0}' at row {1}")]
    UnknownLabel(String, usize),
    #[error("malformed CSV at row {row}: {detail}")]
    MalformedRow { row: usize, detail: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Binary class label. Fake is the positive class: Eq. 3/4-style counts of
/// true positives refer to correctly flagged fake samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Real = 0,
    Fake = 1,
}

impl Label {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Label::Real),
            1 => Some(Label::Fake),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Real => "real",
            Label::Fake => "fake",
        }
    }
}

/// One labeled text sample. `clean_text` is derived from `raw_text` by
/// [`clean_text`] and is what every downstream stage consumes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    pub clean_text: String,
    pub label: Label,
}

impl Document {
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>, label: Label) -> Self {
        let raw_text = raw_text.into();
        let clean_text = clean_text(&raw_text);
        Document {
            id: id.into(),
            raw_text,
            clean_text,
            label,
        }
    }
}

/// Fixed-length token-id view of a document: ids right-padded with PAD,
/// mask 1 on the `n_real` non-PAD prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedInput {
    pub ids: Vec<u32>,
    pub mask: Vec<u8>,
    pub n_real: usize,
}
