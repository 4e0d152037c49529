//! Seed-to-RNG derivation shared by every stage of an experiment.
//!
//! One experiment carries a single `u64` seed. Each stage that consumes
//! randomness draws from its own ChaCha stream of that seed, so adding or
//! removing draws in one stage never perturbs another. Stream ids are part
//! of the reproducibility contract and must not be renumbered.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream id for the train/test subset shuffle.
pub const STREAM_SPLIT: u64 = 0;
/// Stream id for model parameter initialisation.
pub const STREAM_INIT: u64 = 1;
/// Stream id for training-time draws (batch order, RReLU slopes).
pub const STREAM_TRAIN: u64 = 2;
/// Stream id for diagnostic draws (gradient checks, self-tests).
pub const STREAM_CHECK: u64 = 3;

/// RNG for one stage of an experiment: the seed picks the key, the stream
/// id picks an independent substream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
