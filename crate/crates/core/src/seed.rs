//! Counter-based seed derivation.
//!
//! Every random quantity in a simulation is keyed by `(seed, run, stream, ids...)`
//! through a SplitMix64 chain, so draws never depend on evaluation order, thread
//! scheduling, or which other cells/users happen to be present.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Labelled random streams used inside a single Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Users = 0x5553_4552,
    Surge = 0x5355_5247,
    Los = 0x4c4f_5321,
    AssocOrder = 0x4153_534f,
    Failures = 0x4641_494c,
    Shadowing = 0x5348_4144,
    Coverage = 0x434f_5645,
}

const RUN_TAG: u64 = 0x5255_4e5f_5345_4544;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed`, one SplitMix64 round per part.
pub fn mix(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Seed of run `run` under the experiment seed.
pub fn run_seed(seed: u64, run: u64) -> u64 {
    mix(seed, &[RUN_TAG, run])
}

/// Seed of a labelled stream inside a run.
pub fn stream_seed(run_seed: u64, stream: Stream) -> u64 {
    mix(run_seed, &[stream as u64])
}

/// Maps a 64-bit hash onto `[0, 1)` using its top 53 bits.
#[inline]
pub fn unit_interval(hash: u64) -> f64 {
    (hash >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[0, 1)` keyed by `ids` under `seed`.
#[inline]
pub fn keyed_uniform(seed: u64, ids: &[u64]) -> f64 {
    unit_interval(mix(seed, ids))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
