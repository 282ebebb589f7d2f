use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent reproducible stream `stream` derived from a base seed, so
/// results do not depend on how work is scheduled.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
