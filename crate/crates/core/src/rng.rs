//! Seedable, portable pseudo-random numbers.
//!
//! Everything random in this crate flows through [`SplitMix64`] so that a
//! dataset or training run is a pure function of its seed. The generator is
//! integer-only and produces the same stream on every platform.
//!
//! Stream splitting: trajectory `i` of a dataset draws from
//! [`substream`]`(seed, i)`, an independent generator derived from the base
//! seed. Workers can therefore generate trajectories in any order (or in
//! parallel) without changing the result.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Finalization mix from SplitMix64; a bijection on u64 with good avalanche.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator (Steele, Lea & Flood's splittable PRNG).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on [0, 1), using the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [lo, hi).
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    /// Standard normal via the Box-Muller transform.
    ///
    /// Consumes exactly two uniforms per call; the first is shifted into
    /// (0, 1] so the logarithm is always finite.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Independent generator for sub-stream `index` of `seed`.
///
/// Both arguments pass through the SplitMix64 finalizer, so neighbouring
/// indices (and neighbouring seeds) yield uncorrelated streams.
pub fn substream(seed: u64, index: u64) -> SplitMix64 {
    SplitMix64::new(mix64(seed).wrapping_add(mix64(index.wrapping_add(1)).wrapping_mul(GOLDEN_GAMMA)))
}
