//! Counter-based random streams. A `(seed, stream)` pair names one
//! reproducible sequence, so parallel work can draw from independent streams
//! without coordination.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
