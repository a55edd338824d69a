//! Stand-in for an idealized fully-random hash function.

use crate::prg::{mix64, GOLDEN_GAMMA};
use crate::spec::mask;

/// Two rounds of the splitmix64 finalizer keyed by the seed, truncated to
/// `out_bits` low bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FullyRandom {
    k0: u64,
    k1: u64,
    out_mask: u64,
}

impl FullyRandom {
    pub fn new(seed: u64, out_bits: u32) -> Self {
        let k0 = mix64(seed ^ 0xa076_1d64_78bd_642f);
        let k1 = mix64(k0.wrapping_add(GOLDEN_GAMMA));
        Self {
            k0,
            k1,
            out_mask: mask(out_bits),
        }
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        mix64(mix64(x ^ self.k0).wrapping_add(self.k1)) & self.out_mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roughly_uniform_bins() {
        let f = FullyRandom::new(3, 4);
        let mut bins = [0u32; 16];
        for x in 0..160_000u64 {
            bins[f.eval(x) as usize] += 1;
        }
        // 10k expected per bin, sd 97
        assert!(bins.iter().all(|&b| (9_500..10_500).contains(&b)), "{bins:?}");
        assert_ne!(FullyRandom::new(3, 64).eval(1), FullyRandom::new(4, 64).eval(1));
    }
}
