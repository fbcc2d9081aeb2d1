//! Seeded, splittable random streams.
//!
//! A [`SeedStream`] is a root seed plus a path of names. Deriving a child by
//! name never consumes randomness from the parent, so two experiments that
//! ask for `stream.child("rounding")` see the same numbers regardless of what
//! else ran before.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Deterministic generator type used across the crate.
pub type Rng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
    path: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            path: FNV_OFFSET,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream for a named sub-task.
    pub fn child(&self, name: &str) -> Self {
        let mut h = self.path;
        for b in name.bytes().chain(std::iter::once(0xff)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        Self {
            seed: self.seed,
            path: h,
        }
    }

    /// Child stream for the `i`-th item of a sequence (trial, shard, seed).
    pub fn index(&self, i: u64) -> Self {
        let mut h = self.path;
        for b in i.to_le_bytes().into_iter().chain(std::iter::once(0xfe)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        Self {
            seed: self.seed,
            path: h,
        }
    }

    pub fn rng(&self) -> Rng {
        let a = splitmix64(self.seed ^ splitmix64(self.path));
        let b = splitmix64(a ^ self.path.rotate_left(17));
        let c = splitmix64(b ^ self.seed.rotate_left(29));
        let d = splitmix64(c ^ 0x5851_f42d_4c95_7f2d);
        let mut key = [0u8; 32];
        for (chunk, word) in key.chunks_exact_mut(8).zip([a, b, c, d]) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        Rng::from_seed(key)
    }
}
