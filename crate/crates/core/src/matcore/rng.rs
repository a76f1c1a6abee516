//! Seedable random number generation.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood, "Fast splittable
//! pseudorandom number generators", OOPSLA 2014): a 64-bit counter advanced
//! by the golden-ratio increment and scrambled by two xor-shift-multiply
//! rounds. It is tiny, passes BigCrush for this use, and — because it is
//! written out here in full — reruns of a seed inside this crate are
//! bit-stable regardless of external crate versions. Nearby seeds (s, s+1,
//! ...) give independent streams, which is what per-trial seed derivation
//! relies on.

/// SplitMix64 generator. Normal variates come from the Box-Muller transform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_normal: None,
        }
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `0..n`.
    pub fn uniform_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Modulo bias is below 2^-50 for any n this crate uses.
        (self.next_u64() % n as u64) as usize
    }

    /// Standard normal draw via Box-Muller; the paired variate is cached.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// |N(0, 1)| draw.
    pub fn abs_normal(&mut self) -> f64 {
        self.standard_normal().abs()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.uniform_index(i + 1);
            items.swap(i, j);
        }
    }
}
