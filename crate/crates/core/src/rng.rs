//! Deterministic pseudo-random source.
//!
//! `SplitMix64` (Steele, Lea and Flood's splittable generator, the variant
//! used to seed xoshiro): a 64-bit counter advanced by the golden-ratio
//! increment and passed through a fixed avalanche mix. Output for a given
//! seed is part of the file formats' reproducibility contract and must not
//! change; [`GENERATOR_VERSION`] names the revision.

pub const GENERATOR_VERSION: &str = "splitmix64-v1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream for `index`, without consuming from `self`.
    pub fn fork(&self, index: u64) -> Self {
        SplitMix64::new(mix(self.state ^ mix(index.wrapping_add(GOLDEN_GAMMA))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Fair coin from the top output bit.
    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform on (0, 1], 53 bits.
    pub fn next_open_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by the Box-Muller transform (cosine branch only).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_open_unit();
        let u2 = self.next_open_unit();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
