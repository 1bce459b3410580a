//! Counter-based SplitMix64 streams.
//!
//! Draw `i` (0-based) of the stream for `(seed, trial)` is
//!
//! ```text
//! base   = mix64(seed ^ mix64(trial ^ 0x9E3779B97F4A7C15))
//! draw_i = mix64(base + (i + 1) * 0x9E3779B97F4A7C15)        (wrapping)
//! mix64(z): z = (z ^ z >> 30) * 0xBF58476D1CE4E5B9
//!           z = (z ^ z >> 27) * 0x94D049BB133111EB
//!           z ^ z >> 31
//! ```
//!
//! and a uniform double is `(draw >> 11) * 2^-53`. The recipe needs nothing
//! beyond 64-bit wrapping arithmetic, so any language reproduces the same
//! numbers, and trials never share state.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream for one trial of an experiment.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        SplitMix64::new(mix64(seed ^ mix64(trial ^ GOLDEN)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`.
    pub fn next_f64_open0(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n` (multiply-shift; negligible bias for small `n`).
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}
