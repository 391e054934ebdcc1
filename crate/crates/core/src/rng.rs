//! Seeded random streams. Every random draw in the crate comes from a
//! ChaCha8 generator keyed by the trial seed and a fixed stream id, so the
//! placement, library, requests and channel of a trial are independent of one
//! another and reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stream {
    Library = 1,
    Placement = 2,
    Requests = 3,
    Channel = 4,
}

pub(crate) fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
