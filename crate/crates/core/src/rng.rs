//! Counter-based seeding.
//!
//! Every random draw is addressed by `(master_seed, stream)`. The stream index
//! selects an independent ChaCha stream, so the value produced for a given
//! index never depends on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for stream `stream` under `master`.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Derive a child master seed, used to give each experiment family its own key space.
pub fn derive_seed(master: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
