//! Seeded generators. ChaCha keeps streams identical across platforms and
//! word sizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_new(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the generator family keyed by `seed`.
///
/// Replicate `r` of a simulation always draws from `substream(seed, r)`, so
/// results do not depend on how replicates are spread over workers.
pub fn substream(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
