//! Deterministic seed derivation.
//!
//! Every run is driven by a single master seed. Independent work units
//! (grid-search cells, held-out splits, repeated chains) receive their own
//! ChaCha streams derived from the master seed and a unit label, so results
//! are bit-reproducible regardless of execution order or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 step; the standard 64-bit finalizer used for seed expansion.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a label.
///
/// Labels with the same parent yield decorrelated seeds; nesting
/// `child_seed(child_seed(s, a), b)` gives hierarchical streams.
pub fn child_seed(parent: u64, label: u64) -> u64 {
    splitmix64(parent ^ splitmix64(label.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Root RNG for a command given its master seed.
pub fn root_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// RNG for a labeled work unit under `parent`.
pub fn unit_rng(parent: u64, label: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(child_seed(parent, label))
}
