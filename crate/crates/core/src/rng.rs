//! Counter-based random substreams.
//!
//! Every unit of random work (one chromosome in one phase of one generation)
//! draws from its own stream keyed by `(seed, generation, phase, index)`.
//! Streams never share state, so results do not depend on how work is spread
//! over threads.

use rand::RngCore;

/// Phase labels used to key substreams within a generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Phase {
    Init = 1,
    Evaluate = 2,
    Crossover = 3,
    MutateSelect = 4,
    MutateIds = 5,
    MutateStatuses = 6,
    RepairSelect = 7,
    Repair = 8,
    Sweep = 9,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one key; order matters.
pub fn mix_words(words: &[u64]) -> u64 {
    words.iter().fold(0x6A09_E667_F3BC_C908, |acc, &w| {
        mix64(acc ^ mix64(w.wrapping_add(0x9E37_79B9_7F4A_7C15)))
    })
}

/// A SplitMix64 stream: output `i` is a pure function of `(key, i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    /// Substream for one unit of work in a GA run.
    pub fn substream(seed: u64, generation: u64, phase: Phase, index: u64) -> Self {
        Self::new(mix_words(&[seed, generation, phase as u64, index]))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key ^ self.counter.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
