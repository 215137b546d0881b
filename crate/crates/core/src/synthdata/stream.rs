//! Counter-based random streams.
//!
//! Every random quantity is drawn from a ChaCha stream keyed by
//! `(seed, domain)` and positioned by an item index, so the value attached to
//! item `i` does not depend on how many other items were generated before it
//! or on which thread generated it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates the uses of one user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Marginal = 1,
    Rcn = 2,
    Bounded = 3,
    Adversarial = 4,
    Malicious = 5,
    Direction = 6,
    Pool = 7,
    Derive = 8,
    Solver = 9,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed stream factory.
#[derive(Debug, Clone, Copy)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(seed: u64, domain: Domain) -> StreamKey {
        let mut state = seed ^ (domain as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        StreamKey { key }
    }

    /// Generator for item `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

/// Deterministically derives a child seed, e.g. for the `i`-th independent
/// run of a repeated experiment.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    let mut state = seed
        ^ tag.wrapping_mul(0xA24B_AED4_963E_E407)
        ^ index.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    splitmix64(&mut state);
    splitmix64(&mut state)
}
