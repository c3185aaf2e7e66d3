//! Seed derivation.
//!
//! Every random artifact is reproducible from one root integer. A child seed
//! is `split(parent, label)`: the label bytes are folded with FNV-1a, xored
//! into the parent, and the result is finalized with the SplitMix64 mixer.
//! Integer-indexed children use [`split_index`], which mixes the index the
//! same way after the label.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Derive the child seed for stream `label`.
pub fn split(seed: u64, label: &str) -> u64 {
    mix64(seed ^ fnv1a(label.as_bytes()))
}

/// Derive the child seed for item `index` of stream `label`.
pub fn split_index(seed: u64, label: &str, index: u64) -> u64 {
    mix64(split(seed, label) ^ mix64(index))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
