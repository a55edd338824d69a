//! Exhaustive check that simple tabulation is uniform on a set of
//! generalized keys.

use crate::error::{config, Error, Result};
use crate::gf2::{GenKey, KeyLayout};
use crate::spec::mask;

/// Largest number of table fillings or hash tuples enumerated.
const MAX_STATES: u128 = 1 << 24;

/// For every filling of `b` tables over `2^alphabet_bits` characters with
/// `out_bits`-bit entries, hashes each generalized key of `ys` (XOR of its
/// position characters' entries) and counts the resulting tuples.
///
/// `counts[i]` is the number of fillings producing the tuple whose `k`-th
/// hash is `(i >> (k * out_bits)) & mask`.
pub fn exact_uniformity_counts(b: usize, alphabet_bits: u32, out_bits: u32, ys: &[GenKey]) -> Result<Vec<u64>> {
    if ys.is_empty() {
        return Err(Error::EmptySet);
    }
    let layout = KeyLayout::uniform(b, alphabet_bits);
    if let Some(y) = ys.iter().find(|y| **y.layout() != layout) {
        return Err(Error::DimensionMismatch {
            left: layout.dim(),
            right: y.layout().dim(),
        });
    }
    if out_bits == 0 {
        return config("out_bits must be positive");
    }
    let fill_bits = layout.dim() as u128 * out_bits as u128;
    let tuple_bits = ys.len() as u128 * out_bits as u128;
    if fill_bits > 24 {
        return Err(Error::TooLarge(1u128 << fill_bits.min(127)));
    }
    if tuple_bits > 24 || (1u128 << tuple_bits) > MAX_STATES {
        return Err(Error::TooLarge(1u128 << tuple_bits.min(127)));
    }
    // bit offsets in the filling index of each key's position characters
    let supports: Vec<Vec<u32>> = ys
        .iter()
        .map(|y| {
            y.pairs()
                .into_iter()
                .map(|(p, ch)| layout.bit(p, ch) as u32 * out_bits)
                .collect()
        })
        .collect();
    let m = mask(out_bits);
    let mut counts = vec![0u64; 1 << tuple_bits];
    for f in 0..1u64 << fill_bits {
        let mut idx = 0usize;
        for (k, sup) in supports.iter().enumerate() {
            let h = sup.iter().fold(0u64, |acc, &off| acc ^ ((f >> off) & m));
            idx |= (h as usize) << (k as u32 * out_bits);
        }
        counts[idx] += 1;
    }
    Ok(counts)
}

/// Whether every tuple in `R^Y` is produced by equally many fillings.
pub fn exact_uniformity_check(b: usize, alphabet_bits: u32, out_bits: u32, ys: &[GenKey]) -> Result<bool> {
    let counts = exact_uniformity_counts(b, alphabet_bits, out_bits, ys)?;
    Ok(counts.iter().all(|&c| c == counts[0]))
}
