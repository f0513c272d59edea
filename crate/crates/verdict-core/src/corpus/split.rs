//! Seeded stratified splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, Document, Label};
use crate::seed::derive_seed;

/// Split proportions and the seed that fixes the shuffle.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub validation_fraction: Option<f64>,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, validation: Option<f64>, test: f64, seed: u64) -> Self {
        SplitSpec {
            train_fraction: train,
            validation_fraction: validation,
            test_fraction: test,
            seed,
        }
    }

    fn fractions(&self) -> Vec<f64> {
        let mut f = vec![self.train_fraction];
        if let Some(v) = self.validation_fraction {
            f.push(v);
        }
        f.push(self.test_fraction);
        f
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let f = self.fractions();
        let sum: f64 = f.iter().sum();
        if f.iter().any(|x| *x <= 0.0 || *x >= 1.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(CorpusError::InvalidFractions(f));
        }
        Ok(())
    }
}

/// Result of a stratified split.
#[derive(Debug, Clone)]
pub struct SplitDocs {
    pub train: Vec<Document>,
    pub validation: Option<Vec<Document>>,
    pub test: Vec<Document>,
}

impl SplitDocs {
    pub fn counts(&self, label: Label) -> (usize, usize, usize) {
        let count = |docs: &[Document]| docs.iter().filter(|d| d.label == label).count();
        (
            count(&self.train),
            self.validation.as_deref().map_or(0, count),
            count(&self.test),
        )
    }
}

/// Shuffle each class with a seeded RNG and partition it by the requested
/// fractions.
///
/// Per class of size `n`, train receives `floor(train_fraction * n)`, test
/// receives `ceil(test_fraction * n)` and the optional validation split
/// absorbs the remainder, so every split's count is within one document of
/// its exact proportion. Rounding down on train and up on test reproduces
/// conventional published train/test totals for any class composition.
pub fn stratified_split(docs: &[Document], spec: &SplitSpec) -> Result<SplitDocs, CorpusError> {
    spec.validate()?;

    let mut by_class: [Vec<&Document>; 2] = [Vec::new(), Vec::new()];
    for d in docs {
        by_class[d.label.index()].push(d);
    }
    for (i, class_docs) in by_class.iter().enumerate() {
        let label = Label::from_index(i).unwrap();
        if class_docs.len() < 2 {
            return Err(CorpusError::DegenerateClass(label, class_docs.len()));
        }
    }

    let mut train = Vec::new();
    let mut validation = spec.validation_fraction.map(|_| Vec::new());
    let mut test = Vec::new();

    for (ci, class_docs) in by_class.iter_mut().enumerate() {
        let label = Label::from_index(ci).unwrap();
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &format!("split.class{ci}")));
        class_docs.shuffle(&mut rng);

        let n = class_docs.len();
        let n_train = (spec.train_fraction * n as f64).floor() as usize;
        let n_test = (spec.test_fraction * n as f64).ceil() as usize;
        if n_train == 0 {
            return Err(CorpusError::EmptySplit(label, "train"));
        }
        if n_test == 0 {
            return Err(CorpusError::EmptySplit(label, "test"));
        }
        let n_val = n - n_train - n_test;

        train.extend(class_docs[..n_train].iter().map(|d| (*d).clone()));
        if let Some(val) = validation.as_mut() {
            val.extend(
                class_docs[n_train..n_train + n_val]
                    .iter()
                    .map(|d| (*d).clone()),
            );
        }
        test.extend(class_docs[n - n_test..].iter().map(|d| (*d).clone()));
    }

    Ok(SplitDocs {
        train,
        validation,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn corpus(n_real: usize, n_fake: usize) -> Vec<Document> {
        let mut docs = Vec::new();
        for i in 0..n_real {
            docs.push(Document::new(format!("r{i}"), "some real text", Label::Real));
        }
        for i in 0..n_fake {
            docs.push(Document::new(format!("f{i}"), "some fake text", Label::Fake));
        }
        docs
    }

    fn id_multiset(docs: &[Document]) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for d in docs {
            *m.entry(d.id.clone()).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn exact_proportions_when_divisible() {
        let spec = SplitSpec::new(0.8, None, 0.2, 7);
        let split = stratified_split(&corpus(100, 100), &spec).unwrap();
        assert_eq!(split.counts(Label::Real), (80, 0, 20));
        assert_eq!(split.counts(Label::Fake), (80, 0, 20));
    }

    #[test]
    fn fifty_fifty_with_imbalance() {
        let spec = SplitSpec::new(0.5, None, 0.5, 1);
        let split = stratified_split(&corpus(10, 30), &spec).unwrap();
        assert_eq!(split.counts(Label::Real), (5, 0, 5));
        assert_eq!(split.counts(Label::Fake), (15, 0, 15));
    }

    #[test]
    fn degenerate_class_errors() {
        let spec = SplitSpec::new(0.8, None, 0.2, 1);
        let err = stratified_split(&corpus(1, 100), &spec).unwrap_err();
        assert!(matches!(err, CorpusError::DegenerateClass(Label::Real, 1)));
    }

    #[test]
    fn odd_class_rounds_train_down_test_up() {
        let spec = SplitSpec::new(0.8, None, 0.2, 3);
        let split = stratified_split(&corpus(5101, 5100), &spec).unwrap();
        assert_eq!(split.counts(Label::Real), (4080, 0, 1021));
        assert_eq!(split.counts(Label::Fake), (4080, 0, 1020));
        assert_eq!(split.train.len(), 8160);
        assert_eq!(split.test.len(), 2041);
    }

    #[test]
    fn validation_split_counts_stay_within_one_of_exact() {
        let spec = SplitSpec::new(0.5, Some(0.3), 0.2, 11);
        let split = stratified_split(&corpus(9, 9), &spec).unwrap();
        for label in [Label::Real, Label::Fake] {
            let (tr, va, te) = split.counts(label);
            assert!((tr as f64 - 4.5).abs() < 1.0);
            assert!((va as f64 - 2.7).abs() < 1.0);
            assert!((te as f64 - 1.8).abs() < 1.0);
            assert_eq!(tr + va + te, 9);
        }
    }

    #[test]
    fn same_seed_identical_different_seed_same_counts() {
        let docs = corpus(37, 23);
        let a = stratified_split(&docs, &SplitSpec::new(0.7, None, 0.3, 5)).unwrap();
        let b = stratified_split(&docs, &SplitSpec::new(0.7, None, 0.3, 5)).unwrap();
        let c = stratified_split(&docs, &SplitSpec::new(0.7, None, 0.3, 6)).unwrap();
        assert_eq!(id_multiset(&a.train), id_multiset(&b.train));
        assert_eq!(id_multiset(&a.test), id_multiset(&b.test));
        assert_ne!(id_multiset(&a.train), id_multiset(&c.train));
        assert_eq!(a.counts(Label::Real), c.counts(Label::Real));
        assert_eq!(a.counts(Label::Fake), c.counts(Label::Fake));
    }

    #[test]
    fn splits_are_disjoint_and_exhaustive() {
        let docs = corpus(41, 17);
        let spec = SplitSpec::new(0.6, Some(0.2), 0.2, 9);
        let split = stratified_split(&docs, &spec).unwrap();
        let mut combined = split.train.clone();
        combined.extend(split.validation.clone().unwrap());
        combined.extend(split.test.clone());
        assert_eq!(id_multiset(&combined), id_multiset(&docs));
        assert_eq!(combined.len(), docs.len());
    }

    #[test]
    fn invalid_fractions_error() {
        let bad = SplitSpec::new(0.8, None, 0.1, 1);
        assert!(matches!(
            stratified_split(&corpus(4, 4), &bad),
            Err(CorpusError::InvalidFractions(_))
        ));
    }
}
