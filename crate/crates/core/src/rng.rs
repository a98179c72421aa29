//! Counter-keyed random streams.
//!
//! Every random quantity in the crate is drawn from a stream whose key is a
//! pure function of the user seed and the logical coordinates of the draw
//! (round, atom, pair, epoch, replica). Results therefore do not depend on
//! iteration order or on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep streams for different purposes disjoint.
pub(crate) mod tag {
    pub const ROUND_COUNT: u64 = 0x524f_554e_445f_4300;
    pub const ATOM: u64 = 0x4154_4f4d_0000_0000;
    pub const LABEL_RETRY: u64 = 0x4c42_4c5f_5254_5259;
    pub const PAIR: u64 = 0x5041_4952_0000_0000;
    pub const EXACT_ROUNDS: u64 = 0x4558_4143_545f_524e;
    pub const REPLICA: u64 = 0x5245_504c_4943_4100;
    pub const MEASURE: u64 = 0x4d45_4153_5552_4500;
    pub const GRAPH: u64 = 0x4752_4150_4800_0000;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 64-bit stream key from a seed and an ordered list of coordinates.
#[inline]
pub fn stream_key(seed: u64, parts: &[u64]) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    for &p in parts {
        h = mix64(h ^ mix64(p.wrapping_add(GOLDEN)).rotate_left(17));
    }
    h
}

pub fn keyed_rng(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, parts))
}

/// Uniform in `[0, 1)` with 53 bits of resolution, derived from a key.
#[inline]
pub fn unit_from_key(key: u64) -> f64 {
    (mix64(key ^ GOLDEN) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
