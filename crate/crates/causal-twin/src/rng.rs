//! Deterministic random number generation for all stochastic operations.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood, "Fast Splittable
//! Pseudorandom Number Generators", OOPSLA 2014): a 64-bit counter-based
//! generator whose i-th output is `mix(seed + i * GOLDEN)`. Every sampling
//! operation in this crate takes an explicit `u64` seed; substreams for
//! draw/replicate `i` come from [`derive_seed`], so independent draws can be
//! evaluated in any order (or in parallel) and still reproduce the
//! sequential results bit for bit.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for substream `index` of a master `seed`.
///
/// Defined as the `(index + 1)`-th raw output of SplitMix64 seeded with
/// `seed`, computed in O(1) thanks to the counter construction.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draw a state from a normalized probability vector.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Uniform draw from the `k`-simplex (a flat Dirichlet) via sorted
    /// uniform spacings.
    pub fn simplex(&mut self, k: usize) -> Vec<f64> {
        assert!(k >= 1, "simplex dimension must be at least 1");
        if k == 1 {
            return vec![1.0];
        }
        let mut cuts: Vec<f64> = (0..k - 1).map(|_| self.next_f64()).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out = Vec::with_capacity(k);
        let mut prev = 0.0;
        for &c in &cuts {
            out.push(c - prev);
            prev = c;
        }
        out.push(1.0 - prev);
        out
    }

    /// Beta(a, b) draw for positive integer shapes, via order statistics:
    /// the a-th smallest of a+b-1 independent uniforms is Beta(a, b).
    pub fn beta_int(&mut self, a: u32, b: u32) -> f64 {
        assert!(a >= 1 && b >= 1, "beta shapes must be positive integers");
        let n = (a + b - 1) as usize;
        let mut us: Vec<f64> = (0..n).map(|_| self.next_f64()).collect();
        us.sort_by(|x, y| x.partial_cmp(y).unwrap());
        us[(a - 1) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic() {
        let a: Vec<u64> = {
            let mut r = SplitMix64::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = SplitMix64::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn derive_seed_matches_raw_outputs() {
        let mut r = SplitMix64::new(7);
        let outputs: Vec<u64> = (0..4).map(|_| r.next_u64()).collect();
        for (i, &o) in outputs.iter().enumerate() {
            assert_eq!(derive_seed(7, i as u64), o);
        }
    }

    #[test]
    fn simplex_sums_to_one() {
        let mut r = SplitMix64::new(3);
        for k in 1..6 {
            let p = r.simplex(k);
            assert_eq!(p.len(), k);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn beta_means_are_roughly_right() {
        // Beta(5, 1) has mean 5/6; Beta(1, 1) has mean 1/2.
        let mut r = SplitMix64::new(11);
        let n = 20_000;
        let m51: f64 = (0..n).map(|_| r.beta_int(5, 1)).sum::<f64>() / n as f64;
        let m11: f64 = (0..n).map(|_| r.beta_int(1, 1)).sum::<f64>() / n as f64;
        assert!((m51 - 5.0 / 6.0).abs() < 0.01, "mean {m51}");
        assert!((m11 - 0.5).abs() < 0.01, "mean {m11}");
    }
}
