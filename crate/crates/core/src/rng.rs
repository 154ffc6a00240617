//! Counter-based random streams.
//!
//! Every Monte Carlo block draws from its own ChaCha stream keyed by
//! `(seed, block index)`, so results never depend on how blocks are split
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A family of independent streams sharing one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSeed(pub u64);

impl StreamSeed {
    pub fn new(seed: u64) -> Self {
        StreamSeed(seed)
    }

    /// RNG for block `index` of this family.
    pub fn block(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }

    /// Derives an unrelated family, e.g. one per training step or per purpose.
    pub fn derive(&self, tag: u64) -> StreamSeed {
        StreamSeed(splitmix64(self.0 ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }
}

/// Purpose tags for derived seed families.
pub mod tags {
    pub const TRAIN: u64 = 1;
    pub const TEST: u64 = 2;
    pub const SWEEP: u64 = 3;
    pub const EVAL: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
