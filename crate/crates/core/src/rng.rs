//! Seeded random streams.
//!
//! Every randomized operation takes a `u64` seed. Independent units of work
//! (trials, synthetic periods) draw from their own ChaCha stream so that the
//! result does not depend on how the work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

/// Stream `stream` of the generator keyed by `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
