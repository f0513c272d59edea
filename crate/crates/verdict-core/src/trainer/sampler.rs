//! Class-balanced batch construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TrainError;
use crate::corpus::Label;

/// One epoch's batches as index vectors into the dataset.
///
/// The minority class is oversampled with replacement until it matches the
/// majority count, so each epoch's stream carries equal class counts; a class
/// already at the majority count contributes a plain seeded permutation of
/// itself (no duplication). The combined stream is shuffled and chunked.
pub fn balanced_batches(
    labels: &[Label],
    batch_size: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, TrainError> {
    assert!(batch_size >= 1, "batch_size must be >= 1");
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, l) in labels.iter().enumerate() {
        by_class[l.index()].push(i);
    }
    if by_class[0].is_empty() || by_class[1].is_empty() {
        return Err(TrainError::SingleClass);
    }

    let n_max = by_class[0].len().max(by_class[1].len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stream = Vec::with_capacity(2 * n_max);
    for class in &mut by_class {
        if class.len() == n_max {
            class.shuffle(&mut rng);
            stream.extend_from_slice(class);
        } else {
            for _ in 0..n_max {
                stream.push(class[rng.random_range(0..class.len())]);
            }
        }
    }
    stream.shuffle(&mut rng);
    Ok(stream.chunks(batch_size).map(|c| c.to_vec()).collect())
}

/// Plain seeded shuffle into batches, no class balancing.
pub fn shuffled_batches(n: usize, batch_size: usize, seed: u64) -> Vec<Vec<usize>> {
    assert!(batch_size >= 1, "batch_size must be >= 1");
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    indices.chunks(batch_size).map(|c| c.to_vec()).collect()
}
