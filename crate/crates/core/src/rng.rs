//! Seeded random streams.
//!
//! Every random decision of the sampler draws from its own ChaCha stream keyed
//! by `(seed, level, host, purpose)`, so results do not depend on the order in
//! which nodes are processed, and the centralized and distributed runs see
//! the same randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for; part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Edge sampling in trial `i` (1-based) of the first step.
    Trial(u32),
    /// Center marking in the second step.
    Center,
    /// Graph generation.
    Generator,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn mix(acc: u64, word: u64) -> u64 {
    splitmix64(acc ^ splitmix64(word))
}

/// Stream for one `(level, host, purpose)` triple under `seed`.
pub fn stream(seed: u64, level: usize, host: usize, purpose: Purpose) -> StreamRng {
    let tag = match purpose {
        Purpose::Trial(i) => 1u64 << 32 | u64::from(i),
        Purpose::Center => 2u64 << 32,
        Purpose::Generator => 3u64 << 32,
    };
    let key = mix(mix(mix(splitmix64(seed), level as u64), host as u64), tag);
    ChaCha8Rng::seed_from_u64(key)
}

/// Plain stream for `seed`, used by graph generators.
pub fn seeded(seed: u64) -> StreamRng {
    stream(seed, 0, 0, Purpose::Generator)
}
