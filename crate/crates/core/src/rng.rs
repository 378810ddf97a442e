//! Deterministic random streams.
//!
//! Every stochastic quantity is drawn from a ChaCha stream selected by
//! `(seed, stream id)`, so results do not depend on evaluation order or on how
//! work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for per-device mismatch sampling.
pub const VARIATION_STREAM: u64 = 0;
/// Stream used for sweeps.
pub const SWEEP_STREAM: u64 = 1;
/// First stream of the per-trial block; trial `k` uses `TRIAL_STREAM_BASE + k`.
pub const TRIAL_STREAM_BASE: u64 = 1 << 32;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
