//! Whitespace-token vocabulary and fixed-length encoding.
//!
//! Tokenization is whitespace-based over a learned vocabulary rather than
//! subword: attribution units stay human-readable whole words.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Document, TokenizedInput};

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;

const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// Token vocabulary with dense ids `0..len`. PAD=0 and UNK=1 are always
/// present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocab {
    id_to_token: Vec<String>,
    #[serde(skip)]
    token_to_id: HashMap<String, u32>,
    pub min_freq: usize,
    pub max_size: usize,
}

impl Vocab {
    /// Rebuild from the id-ordered token list (used by deserialization and
    /// checkpoint loading).
    pub fn from_tokens(
        id_to_token: Vec<String>,
        min_freq: usize,
        max_size: usize,
    ) -> Self {
        let token_to_id = id_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocab {
            id_to_token,
            token_to_id,
            min_freq,
            max_size,
        }
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.id_to_token.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    pub fn contains(&self, token: &str) -> bool {
        self.token_to_id.contains_key(token)
    }

    /// A deterministic token guaranteed to map to UNK: the shortest run of
    /// `q` characters not present in the vocabulary. Survives text cleaning
    /// unchanged, so explainers can use it as a neutral baseline token.
    pub fn oov_token(&self) -> String {
        let mut t = String::from("q");
        while self.contains(&t) {
            t.push('q');
        }
        t
    }
}

/// Build a vocabulary from the clean text of `docs`.
///
/// Keeps every token with corpus frequency >= `min_freq`, ordered by
/// frequency descending with lexicographic tie-break, truncated so the whole
/// vocabulary (PAD and UNK included) has at most `max_size` entries.
pub fn build_vocab(
    docs: &[Document],
    min_freq: usize,
    max_size: usize,
) -> Result<Vocab, CorpusError> {
    if docs.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if min_freq < 1 {
        return Err(CorpusError::InvalidMinFreq(min_freq));
    }
    if max_size < 2 {
        return Err(CorpusError::InvalidMaxSize(max_size));
    }

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        for token in doc.clean_text.split_whitespace() {
            *counts.entry(token).or_insert(0) += 1;
        }
    }

    let mut ranked: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|(_, n)| *n >= min_freq)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_size - 2);

    let mut id_to_token = Vec::with_capacity(ranked.len() + 2);
    id_to_token.push(PAD_TOKEN.to_string());
    id_to_token.push(UNK_TOKEN.to_string());
    id_to_token.extend(ranked.into_iter().map(|(t, _)| t.to_string()));

    Ok(Vocab::from_tokens(id_to_token, min_freq, max_size))
}

/// Encode a document's clean text: whitespace tokens mapped through the
/// vocabulary (missing tokens to UNK), truncated to `max_len`, right-padded
/// with PAD.
pub fn encode(doc: &Document, vocab: &Vocab, max_len: usize) -> TokenizedInput {
    encode_text(&doc.clean_text, vocab, max_len)
}

/// [`encode`] on an already-cleaned text string.
pub fn encode_text(text: &str, vocab: &Vocab, max_len: usize) -> TokenizedInput {
    assert!(max_len >= 1, "max_len must be >= 1");
    let mut ids: Vec<u32> = text
        .split_whitespace()
        .take(max_len)
        .map(|t| vocab.id(t).unwrap_or(UNK_ID))
        .collect();
    let n_real = ids.len();
    ids.resize(max_len, PAD_ID);
    let mut mask = vec![0u8; max_len];
    for m in mask.iter_mut().take(n_real) {
        *m = 1;
    }
    TokenizedInput { ids, mask, n_real }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;

    fn doc(text: &str) -> Document {
        Document::new("d", text, Label::Real)
    }

    #[test]
    fn keeps_only_tokens_at_min_freq() {
        let docs = vec![doc("a b"), doc("a c")];
        let v = build_vocab(&docs, 2, 100).unwrap();
        assert_eq!(v.tokens(), &["<pad>", "<unk>", "a"]);
        assert_eq!(v.id("a"), Some(2));
        assert_eq!(v.id("b"), None);
    }

    #[test]
    fn truncates_with_lexicographic_tie_break() {
        let docs = vec![doc("x y")];
        let v = build_vocab(&docs, 1, 3).unwrap();
        assert_eq!(v.tokens(), &["<pad>", "<unk>", "x"]);
    }

    #[test]
    fn rejects_empty_corpus_and_bad_limits() {
        assert!(matches!(
            build_vocab(&[], 1, 10),
            Err(CorpusError::EmptyCorpus)
        ));
        let docs = vec![doc("a")];
        assert!(matches!(
            build_vocab(&docs, 0, 10),
            Err(CorpusError::InvalidMinFreq(0))
        ));
        assert!(matches!(
            build_vocab(&docs, 1, 1),
            Err(CorpusError::InvalidMaxSize(1))
        ));
    }

    #[test]
    fn encode_pads_and_masks() {
        let docs = vec![doc("a b")];
        let v = build_vocab(&docs, 1, 10).unwrap();
        let t = encode(&doc("a b"), &v, 4);
        assert_eq!(t.ids, vec![2, 3, 0, 0]);
        assert_eq!(t.mask, vec![1, 1, 0, 0]);
        assert_eq!(t.n_real, 2);
    }

    #[test]
    fn encode_maps_unknown_to_unk() {
        let docs = vec![doc("a")];
        let v = build_vocab(&docs, 1, 10).unwrap();
        let t = encode(&doc("a z"), &v, 2);
        assert_eq!(t.ids, vec![2, UNK_ID]);
        assert_eq!(t.mask, vec![1, 1]);
    }

    #[test]
    fn encode_truncates() {
        let docs = vec![doc("a b c")];
        let v = build_vocab(&docs, 1, 10).unwrap();
        let t = encode(&doc("a b c"), &v, 2);
        assert_eq!(t.ids.len(), 2);
        assert_eq!(t.n_real, 2);
        assert_eq!(t.ids, vec![v.id("a").unwrap(), v.id("b").unwrap()]);
    }

    #[test]
    fn oov_token_is_never_in_vocab() {
        let docs = vec![doc("q qq qqq")];
        let v = build_vocab(&docs, 1, 10).unwrap();
        let t = v.oov_token();
        assert!(!v.contains(&t));
        assert_eq!(t, "qqqq");
    }
}
