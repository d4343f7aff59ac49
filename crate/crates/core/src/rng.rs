//! Counter-based replicate streams.
//!
//! Replicate `j` under seed `s` draws from ChaCha8 keyed by `s` with stream id
//! `j`, so a replicate's randomness never depends on which worker ran it or
//! in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct ReplicateStreams {
    key: <ChaCha8Rng as SeedableRng>::Seed,
    seed: u64,
}

impl ReplicateStreams {
    pub fn new(seed: u64) -> Self {
        Self { key: ChaCha8Rng::seed_from_u64(seed).get_seed(), seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator for replicate `j`, positioned at word 0.
    pub fn stream(&self, replicate: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(replicate);
        rng
    }
}
