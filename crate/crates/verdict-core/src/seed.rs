//! Seed derivation.
//!
//! A run has one root seed; every randomized stage derives its own stream
//! from `(root, tag)` so stages are independently reproducible and adding a
//! stage never perturbs the randomness of another.

/// Derive a child seed from a root seed and a stage tag.
///
/// FNV-1a over the tag bytes, mixed with the root through two splitmix64
/// rounds. Stable across platforms.
pub fn derive_seed(root: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(splitmix64(root ^ h))
}

/// One splitmix64 mixing round; also used to fan a stage seed out per item.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
