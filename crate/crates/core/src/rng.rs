//! Counter-based random streams.
//!
//! Each Monte Carlo sample draws from its own ChaCha8 stream selected by the
//! sample index, so any partition of the sample range across workers consumes
//! exactly the same random numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream for item `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Like [`stream`] but with a domain tag mixed into the key, so that two
/// consumers sharing a user seed never share streams.
pub fn tagged_stream(seed: u64, tag: u64, index: u64) -> StreamRng {
    let mixed = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    stream(mixed, index)
}
