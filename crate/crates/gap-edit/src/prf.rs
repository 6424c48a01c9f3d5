//! Shared randomness for the two preprocessing sides.
//!
//! Both sides must derive byte-identical trees, sample sets and hash
//! coefficients from the master seed alone, in separate processes. Every
//! random draw is keyed by `(seed, repetition, node, purpose, counter)`
//! through SHA-256 into a ChaCha stream, so draws are independent across
//! keys and reproducible across machines.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

/// Purpose tags separating the independent randomness streams per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Tolerance,
    SampleSet,
    HashCoeff,
}

impl Purpose {
    fn tag(self) -> u32 {
        match self {
            Purpose::Tolerance => 1,
            Purpose::SampleSet => 2,
            Purpose::HashCoeff => 3,
        }
    }
}

/// Deterministic stream of 64-bit values for one `(seed, rep, node, purpose)` key.
pub struct DerivedStream {
    rng: ChaCha12Rng,
}

impl DerivedStream {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[0, bound)` via rejection (no modulo bias).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}

/// Derives the keyed stream for `(seed, rep, node, purpose, counter)`.
pub fn derive_randomness(
    seed: &[u8; 32],
    repetition: u32,
    node_id: u64,
    purpose: Purpose,
    counter: u64,
) -> DerivedStream {
    let mut h = Sha256::new();
    h.update(b"gap-edit.prf.v1");
    h.update(seed);
    h.update(repetition.to_le_bytes());
    h.update(node_id.to_le_bytes());
    h.update(purpose.tag().to_le_bytes());
    h.update(counter.to_le_bytes());
    let digest: [u8; 32] = h.finalize().into();
    DerivedStream {
        rng: ChaCha12Rng::from_seed(digest),
    }
}

/// Expands a human-friendly 64-bit seed into a master seed.
pub fn master_seed_from_u64(seed: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"gap-edit.master.v1");
    h.update(seed.to_le_bytes());
    h.finalize().into()
}
