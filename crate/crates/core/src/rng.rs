//! Counter-based random streams.
//!
//! Every particle or sample owns the ChaCha8 stream selected by its index
//! under a common seed, so results do not depend on how work is split
//! between threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
