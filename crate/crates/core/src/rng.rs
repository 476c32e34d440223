//! Deterministic seeding.
//!
//! Sampling operations take an explicit `u64` seed and draw each trial from
//! its own ChaCha substream, so trial results do not depend on evaluation
//! order and can be reproduced (or parallelized) trial by trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for whole-run draws (e.g. random unitaries).
pub fn master_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for a single trial. Stream 0 is reserved for [`master_rng`];
/// trial substreams start at 1.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}
