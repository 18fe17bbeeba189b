//! Seed derivation.
//!
//! Every random decision in the crate draws from a ChaCha stream whose
//! seed is derived from one root seed plus a component tag path. Streams
//! for different components are therefore independent, and any part of a
//! run can be reproduced in isolation from the root seed alone.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Component tags for seed derivation paths.
pub mod tag {
    pub const SYNTH: u64 = 0x01;
    pub const FOLDS: u64 = 0x02;
    pub const FOLD_VALIDATION: u64 = 0x03;
    pub const SMOTE: u64 = 0x04;
    pub const RANKER: u64 = 0x05;
    pub const CLASSIFIER: u64 = 0x06;
    pub const TREE: u64 = 0x07;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `root` and a tag path.
///
/// The derivation is a splitmix64 fold, so sibling paths produce
/// unrelated streams and the mapping is stable across platforms.
pub fn derive_seed(root: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(root ^ 0x7465_726d_6f66_6f6f); // "termofoo"
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t));
    }
    state
}

/// Deterministic RNG for a derived seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_tag_sensitive() {
        let a = derive_seed(7, &[tag::SYNTH, 0]);
        let b = derive_seed(7, &[tag::SYNTH, 0]);
        let c = derive_seed(7, &[tag::SYNTH, 1]);
        let d = derive_seed(8, &[tag::SYNTH, 0]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn sibling_components_differ() {
        assert_ne!(
            derive_seed(1, &[tag::FOLDS]),
            derive_seed(1, &[tag::SMOTE])
        );
    }
}
