//! Counter-based seeding.
//!
//! A ChaCha8 key is derived from `(seed, trial)` and every point gets its own
//! 64-bit stream id, so the coordinates of point `j` in trial `k` depend only
//! on `(seed, k, j)`. Serial and parallel generation therefore agree exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream id reserved for per-trial auxiliary draws (probe sub-sampling etc).
pub const AUX_STREAM: u64 = u64::MAX;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Base generator for one trial; clone it and call [`point_rng`] per index.
#[derive(Clone, Debug)]
pub struct TrialSeed {
    base: ChaCha8Rng,
}

impl TrialSeed {
    pub fn new(seed: u64, trial: u64) -> Self {
        let mut state = seed ^ trial.rotate_left(32) ^ 0x5EB5_EED0_0000_0000;
        // mix the trial in twice so (seed, trial) and (trial, seed) differ
        state = state.wrapping_add(splitmix64(&mut trial.clone()));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        TrialSeed {
            base: ChaCha8Rng::from_seed(key),
        }
    }

    /// Independent stream for point `index`.
    pub fn point_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng
    }

    pub fn aux_rng(&self) -> ChaCha8Rng {
        self.point_rng(AUX_STREAM)
    }
}
