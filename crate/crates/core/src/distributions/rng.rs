use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded, splittable random stream.
///
/// Child streams are keyed by `(seed, index)`: each child gets a ChaCha key
/// derived from both and a distinct ChaCha stream id, so siblings never
/// overlap and a child is reproducible from its parent's seed alone.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream; does not advance `self`.
    pub fn split(&self, index: u64) -> Self {
        let seed = splitmix64(self.seed ^ splitmix64(index.wrapping_add(1)));
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        RngStream { seed, inner }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
