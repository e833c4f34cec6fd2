//! Replayable d20 stream.
//!
//! The die at `position` of the stream for `seed` is a pure function of the
//! two numbers, so a log that records the seed and the number of dice drawn
//! can be re-rolled bit-for-bit by any implementation:
//!
//! ```text
//! GAMMA = 0x9E3779B97F4A7C15
//! mix(z):
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//!
//! die(seed, position):
//!     x = mix(seed + GAMMA * (position + 1))
//!     loop:
//!         m = x * 20                      (128-bit product)
//!         if low64(m) >= 16: return high64(m) + 1
//!         x = mix(x)
//! ```
//!
//! All arithmetic wraps modulo 2^64. `mix` is the SplitMix64 finalizer, so
//! the raw value at position `p` equals the `p`-th output of a SplitMix64
//! generator seeded with `seed`. The rejection test (16 = 2^64 mod 20) makes
//! the faces exactly uniform.

use serde::{Deserialize, Serialize};

pub const DIE_FACES: u8 = 20;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const REJECT_BELOW: u64 = (u64::MAX % DIE_FACES as u64 + 1) % DIE_FACES as u64;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Face (1..=20) at `position` of the stream for `seed`.
pub fn die_at(seed: u64, position: u64) -> u8 {
    let mut x = mix(seed.wrapping_add(GAMMA.wrapping_mul(position.wrapping_add(1))));
    loop {
        let m = x as u128 * DIE_FACES as u128;
        if (m as u64) >= REJECT_BELOW {
            return (m >> 64) as u8 + 1;
        }
        x = mix(x);
    }
}

/// A position in a seeded die stream. Advancing returns a new value; the
/// stream itself is never mutated behind the caller's back.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiceStream {
    pub seed: u64,
    pub position: u64,
}

impl DiceStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, position: 0 }
    }

    pub fn at(seed: u64, position: u64) -> Self {
        Self { seed, position }
    }

    /// Next face without advancing.
    pub fn peek(&self) -> u8 {
        die_at(self.seed, self.position)
    }

    pub fn advance(self, n: u64) -> Self {
        Self {
            seed: self.seed,
            position: self.position + n,
        }
    }

    /// Draw `n` faces, returning them and the advanced stream.
    pub fn draw(self, n: usize) -> (Vec<u8>, Self) {
        let faces = (0..n as u64)
            .map(|i| die_at(self.seed, self.position + i))
            .collect();
        (faces, self.advance(n as u64))
    }
}
