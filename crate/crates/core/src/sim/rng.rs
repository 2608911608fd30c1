//! Counter-style random streams.
//!
//! A generator is addressed by `(seed, run, lane, step)`: the seed keys a
//! ChaCha8 cipher, `(run, lane)` selects one of its 2^64 streams and `step`
//! jumps to a fixed window of the keystream. The draw index is the position
//! inside that window. Any step of any run can be regenerated without
//! replaying earlier draws, so runs can execute in any order on any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved per step. Far more than a step ever consumes.
const WORDS_PER_STEP_LOG2: u32 = 32;

/// Lane identifiers; one per network in a run.
pub const LANE_PRIMARY: u8 = 0;
pub const LANE_PARTNER: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    seed: u64,
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for one step of one lane of one run.
    pub fn step_rng(&self, run: u64, lane: u8, step: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((run << 8) | u64::from(lane));
        rng.set_word_pos(u128::from(step) << WORDS_PER_STEP_LOG2);
        rng
    }
}
