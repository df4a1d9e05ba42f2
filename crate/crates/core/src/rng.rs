//! Seeded random substreams.
//!
//! Every consumer of randomness (instance generation, parameter init,
//! exploration, arbitration, replay sampling, target waypoints) draws from its own ChaCha stream derived
//! from the run seed, so toggling one component never shifts another's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent purposes that get their own stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    Instance = 2,
    Init = 3,
    Exploration = 4,
    Replay = 5,
    Target = 6,
    Update = 7,
    Arbitration = 8,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a path of labels into a single seed.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

/// Stream for `purpose` under the seed derived from `(base, path)`.
pub fn stream(base: u64, path: &[u64], purpose: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(base, path));
    rng.set_stream(purpose as u64);
    rng
}
