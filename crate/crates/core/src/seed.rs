//! Deterministic seed derivation.
//!
//! Every random stream in an experiment is seeded from a 64-bit value derived
//! from the master seed and a path of integer labels. The mixing function is
//! the SplitMix64 finalizer applied after each label is folded in:
//!
//! ```text
//! h_0     = mix(master + G)
//! h_{i+1} = mix(h_i ^ (label_i + G))      where G = 0x9E3779B97F4A7C15
//! mix(z)  = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB; z ^ (z >> 31)
//! ```
//!
//! (all arithmetic wrapping). Streams are ChaCha8 generators seeded with the
//! derived value via `SeedableRng::seed_from_u64`. Because each replication
//! and each matrix row gets its own stream, output does not depend on the
//! order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream role labels, folded in as the last component of a seed path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamRole {
    Noise = 1,
    Theta = 2,
    LimitPoints = 3,
    LargeDeviation = 4,
    PairPoint = 5,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of labels into a seed.
pub fn derive(master: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(mix64(master.wrapping_add(GOLDEN_GAMMA)), |h, &l| {
        mix64(h ^ l.wrapping_add(GOLDEN_GAMMA))
    })
}

/// Seed of replication `rep` at sample size `n` for the given role.
pub fn child_seed(master: u64, n: u64, rep: u64, role: StreamRole) -> u64 {
    derive(master, &[n, rep, role as u64])
}

/// Seed of row `row` within a stream.
pub fn row_seed(stream: u64, row: u64) -> u64 {
    derive(stream, &[row])
}

pub type StreamRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
