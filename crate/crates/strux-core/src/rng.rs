//! Seeded randomness with platform-stable output.
//!
//! Every random decision in the crate flows through [`DetRng`] so that a
//! suite seed reproduces byte-identical output on any platform. Draws are
//! made over `u64` with rejection sampling; `usize` never touches the
//! stream, so 32-bit and 64-bit builds agree.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Hash a list of byte strings to a seed. Parts are length-prefixed so the
/// encoding is injective; the result is the first eight bytes of the SHA-256
/// digest, little endian.
pub fn stable_hash(parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// Derive an independent stream seed from a base seed and a stream label.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    stable_hash(&[&base.to_le_bytes(), label.as_bytes()])
}

/// Lowercase identifier alphabet.
pub const LOWER: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
/// Uppercase key alphabet.
pub const UPPER: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
/// Alphanumeric cell alphabet.
pub const ALNUM: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

/// Attempts made by [`DetRng::mint`] before reporting the space exhausted.
const MINT_ATTEMPTS: u32 = 10_000;

/// Deterministic random stream.
pub struct DetRng {
    inner: ChaCha8Rng,
}

impl DetRng {
    pub fn from_seed(seed: u64) -> Self {
        Self { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw from the inclusive range `lo..=hi`, bias-free.
    pub fn range_u64(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = hi.wrapping_sub(lo).wrapping_add(1);
        if span == 0 {
            // Full u64 domain.
            return self.next_u64();
        }
        // Largest value below which `v % span` is uniform.
        let zone = u64::MAX - (u64::MAX - span + 1) % span;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return lo + v % span;
            }
        }
    }

    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        self.range_u64(lo as u64, hi as u64) as usize
    }

    /// Uniform index into a slice of length `len`. Panics on `len == 0`.
    pub fn index(&mut self, len: usize) -> usize {
        assert!(len > 0, "cannot index an empty slice");
        self.range_usize(0, len - 1)
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    /// True with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        (self.next_u64() as f64) / (u64::MAX as f64 + 1.0) < p
    }

    /// Random token over `alphabet` with length drawn from `len_lo..=len_hi`.
    pub fn token(&mut self, alphabet: &[u8], len_lo: usize, len_hi: usize) -> String {
        let len = self.range_usize(len_lo, len_hi);
        let mut s = String::with_capacity(len);
        for _ in 0..len {
            s.push(alphabet[self.index(alphabet.len())] as char);
        }
        s
    }

    /// Mint a token not yet in `used`, registering it. Rejection sampling;
    /// errors once the configured length range stops yielding fresh tokens.
    pub fn mint(
        &mut self,
        alphabet: &[u8],
        len_lo: usize,
        len_hi: usize,
        used: &mut HashSet<String>,
    ) -> Result<String> {
        for _ in 0..MINT_ATTEMPTS {
            let t = self.token(alphabet, len_lo, len_hi);
            if used.insert(t.clone()) {
                return Ok(t);
            }
        }
        Err(Error::IdSpaceExhausted { attempts: MINT_ATTEMPTS, lo: len_lo, hi: len_hi })
    }

    /// Fisher-Yates shuffle driven by this stream.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
