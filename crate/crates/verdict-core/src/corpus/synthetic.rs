//! Synthetic corpus generation for desk-scale experiments.
//!
//! Fake documents plant cue tokens from [`FAKE_CUES`], real documents from
//! [`REAL_CUES`]; both classes share the same [`FILLER`] distribution, so the
//! class signal lives entirely in the planted cues and attribution methods
//! have known tokens to recover. Cue lexicons are disjoint from each other
//! and from the filler lexicon.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Document, Label};

pub const FAKE_CUES: [&str; 10] = [
    "hoax",
    "microchip",
    "miracle",
    "shocking",
    "exposed",
    "coverup",
    "secret",
    "cure",
    "conspiracy",
    "banned",
];

pub const REAL_CUES: [&str; 10] = [
    "study",
    "safe",
    "vaccine",
    "data",
    "research",
    "evidence",
    "published",
    "clinical",
    "trial",
    "experts",
];

pub const FILLER: [&str; 20] = [
    "the", "a", "report", "today", "people", "news", "said", "about", "health", "new", "world",
    "officials", "claims", "online", "post", "share", "readers", "story", "week", "public",
];

const MIN_LEN: usize = 8;
const MAX_LEN: usize = 16;
const MAX_CUES: usize = 3;

/// Generate `n_per_class` documents per label, deterministically from `seed`.
///
/// Each document draws a length in 8..=16, between 1 and 3 cue tokens from
/// its class lexicon at uniformly random positions, and filler everywhere
/// else.
pub fn generate_synthetic(n_per_class: usize, seed: u64) -> Vec<Document> {
    assert!(n_per_class >= 1, "n_per_class must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(2 * n_per_class);
    for label in [Label::Real, Label::Fake] {
        let cues: &[&str] = match label {
            Label::Real => &REAL_CUES,
            Label::Fake => &FAKE_CUES,
        };
        for i in 0..n_per_class {
            let text = sample_text(&mut rng, cues);
            docs.push(Document::new(format!("{}-{i:05}", label.name()), text, label));
        }
    }
    docs
}

fn sample_text(rng: &mut ChaCha8Rng, cues: &[&str]) -> String {
    let len = rng.random_range(MIN_LEN..=MAX_LEN);
    let n_cues = rng.random_range(1..=MAX_CUES.min(len));

    // Partial Fisher-Yates over positions: first n_cues entries are the
    // uniformly chosen cue slots.
    let mut positions: Vec<usize> = (0..len).collect();
    for i in 0..n_cues {
        let j = rng.random_range(i..len);
        positions.swap(i, j);
    }
    let cue_slots = &positions[..n_cues];

    let mut tokens: Vec<&str> = (0..len)
        .map(|_| FILLER[rng.random_range(0..FILLER.len())])
        .collect();
    for &slot in cue_slots {
        tokens[slot] = cues[rng.random_range(0..cues.len())];
    }
    tokens.join(" ")
}
