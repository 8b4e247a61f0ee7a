//! Seeded splitmix64 generator.
//!
//! All probabilistic verification in this crate (random directions, random
//! instances in tests, the CLI sampling commands) draws from this single
//! 64-bit generator so that a run is reproducible from its seed alone.

use crate::poly::Rat;
use num_bigint::BigInt;

/// Splitmix64 state. Deterministic, platform independent.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[lo, hi]` (inclusive).
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Uniform integer in `[lo, hi]` as an exact rational.
    pub fn small_rat(&mut self, lo: i64, hi: i64) -> Rat {
        Rat::from(BigInt::from(self.range_i64(lo, hi)))
    }

    /// Rational with numerator in `[-num_max, num_max]` and denominator in
    /// `[1, den_max]`.
    pub fn rat(&mut self, num_max: i64, den_max: i64) -> Rat {
        let num = self.range_i64(-num_max, num_max);
        let den = self.range_i64(1, den_max);
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    /// Random direction on the unit sphere in `R^n` (Gaussian via Box-Muller,
    /// then normalized). Retries in the measure-zero event of a zero vector;
    /// the degenerate `n = 0` case returns the empty vector.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        if n == 0 {
            return Vec::new();
        }
        loop {
            let v: Vec<f64> = (0..n).map(|_| self.gaussian()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    /// Standard Gaussian via Box-Muller.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = loop {
            let u = self.next_f64();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn reference_values() {
        // First outputs of splitmix64 with seed 1234567.
        let mut r = SplitMix64::new(1234567);
        let x = r.next_u64();
        let mut r2 = SplitMix64::new(1234567);
        assert_eq!(x, r2.next_u64());
        assert_ne!(x, r.next_u64());
    }

    #[test]
    fn unit_vectors_are_normalized() {
        let mut r = SplitMix64::new(42);
        for n in 1..6 {
            let v = r.unit_vector(n);
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
