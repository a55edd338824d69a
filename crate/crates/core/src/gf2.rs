//! Generalized keys as F2 vectors over position characters, and incremental
//! Gaussian elimination with witness extraction.
//!
//! A key over `b` positions is the set of its `b` position characters
//! `(i, x_i)`. Sets of keys are linearly dependent exactly when some
//! non-empty subset has every position character an even number of times
//! (a zero-set).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hash::TornadoHash;
use crate::spec::TornadoSpec;

/// Bit layout of a generalized key: position-major, then character.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyLayout {
    widths: Vec<u32>,
    offsets: Vec<usize>,
}

impl KeyLayout {
    /// `positions` positions, each over an alphabet of `2^bits` characters.
    pub fn uniform(positions: usize, bits: u32) -> Self {
        Self::mixed(vec![bits; positions])
    }

    pub fn mixed(widths: Vec<u32>) -> Self {
        let mut offsets = Vec::with_capacity(widths.len() + 1);
        let mut total = 0usize;
        offsets.push(0);
        for &w in &widths {
            total += 1usize << w;
            offsets.push(total);
        }
        Self { widths, offsets }
    }

    /// Layout of the derived keys of `spec` (wide tail for tornado-mix).
    pub fn for_derived(spec: &TornadoSpec) -> Self {
        Self::mixed((1..=spec.derived_len()).map(|p| spec.position_bits(p)).collect())
    }

    pub fn positions(&self) -> usize {
        self.widths.len()
    }

    /// Vector dimension in bits.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn words(&self) -> usize {
        self.dim().div_ceil(64)
    }

    /// Bit index of position character `(position, ch)`, 0-based position.
    #[inline]
    pub fn bit(&self, position: usize, ch: u32) -> usize {
        self.offsets[position] + ch as usize
    }

    /// Sets the position characters of `chars` in `out` (which is cleared).
    #[inline]
    pub fn encode_into(&self, chars: &[u32], out: &mut [u64]) {
        out.fill(0);
        for (i, &ch) in chars.iter().enumerate() {
            let b = self.bit(i, ch);
            out[b / 64] |= 1 << (b % 64);
        }
    }

    /// Splits a packed key word into characters, `x_1` lowest.
    pub fn split_key(&self, x: u64) -> Vec<u32> {
        let mut shift = 0;
        self.widths
            .iter()
            .map(|&w| {
                let ch = if shift >= 64 { 0 } else { (x >> shift) & ((1u64 << w) - 1) };
                shift += w;
                ch as u32
            })
            .collect()
    }
}

/// A set of position characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenKey {
    layout: Arc<KeyLayout>,
    bits: Vec<u64>,
}

impl GenKey {
    pub fn empty(layout: Arc<KeyLayout>) -> Self {
        let bits = vec![0; layout.words()];
        Self { layout, bits }
    }

    pub fn from_chars(layout: Arc<KeyLayout>, chars: &[u32]) -> Self {
        debug_assert_eq!(chars.len(), layout.positions());
        let mut bits = vec![0; layout.words()];
        layout.encode_into(chars, &mut bits);
        Self { layout, bits }
    }

    /// The regular key `x` viewed as a set of position characters.
    pub fn from_key(layout: Arc<KeyLayout>, x: u64) -> Self {
        let chars = layout.split_key(x);
        Self::from_chars(layout, &chars)
    }

    /// Arbitrary set of `(position, ch)` pairs, 0-based positions. Pairs
    /// listed twice cancel.
    pub fn from_pairs(layout: Arc<KeyLayout>, pairs: &[(usize, u32)]) -> Self {
        let mut k = Self::empty(layout);
        for &(p, ch) in pairs {
            k.toggle(p, ch);
        }
        k
    }

    pub fn toggle(&mut self, position: usize, ch: u32) {
        let b = self.layout.bit(position, ch);
        self.bits[b / 64] ^= 1 << (b % 64);
    }

    pub fn contains(&self, position: usize, ch: u32) -> bool {
        let b = self.layout.bit(position, ch);
        self.bits[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn layout(&self) -> &Arc<KeyLayout> {
        &self.layout
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    pub fn count(&self) -> u32 {
        self.bits.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Set bits as `(position, ch)` pairs in layout order.
    pub fn pairs(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for p in 0..self.layout.positions() {
            for b in self.layout.offsets[p]..self.layout.offsets[p + 1] {
                if self.bits[b / 64] >> (b % 64) & 1 == 1 {
                    out.push((p, (b - self.layout.offsets[p]) as u32));
                }
            }
        }
        out
    }

    fn check_same(&self, other: &GenKey) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch {
                left: self.layout.dim(),
                right: other.layout.dim(),
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &GenKey) -> Result<GenKey> {
        self.check_same(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect();
        Ok(GenKey {
            layout: self.layout.clone(),
            bits,
        })
    }
}

/// `(x △ y)[≤ prefix]`: symmetric difference restricted to the first
/// `prefix` positions.
pub fn diff_key(x: &GenKey, y: &GenKey, prefix: usize) -> Result<GenKey> {
    let mut d = x.xor(y)?;
    let cut = d.layout.offsets[prefix.min(d.layout.positions())];
    for (i, w) in d.bits.iter_mut().enumerate() {
        let lo = i * 64;
        if lo >= cut {
            *w = 0;
        } else if cut - lo < 64 {
            *w &= (1u64 << (cut - lo)) - 1;
        }
    }
    Ok(d)
}

/// Whether every position character occurs an even number of times in `ys`.
/// The empty set is not a zero-set.
pub fn is_zero_set(ys: &[GenKey]) -> Result<bool> {
    let first = ys.first().ok_or(Error::EmptySet)?;
    let mut acc = first.bits.clone();
    for y in &ys[1..] {
        first.check_same(y)?;
        for (a, b) in acc.iter_mut().zip(&y.bits) {
            *a ^= b;
        }
    }
    Ok(acc.iter().all(|&w| w == 0))
}

/// Result of inserting a vector into a [`Gf2Basis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insertion {
    Independent,
    /// The vector reduced to zero. Holds the insertion indices whose XOR is
    /// zero (including the new one) when witnesses are tracked, else empty.
    Dependent(Vec<usize>),
}

#[derive(Debug, Clone)]
struct Row {
    bits: Vec<u64>,
    pivot: usize,
    combo: Vec<u64>,
}

/// Incremental row-echelon basis over F2.
///
/// Each row is reduced against all earlier rows at insertion, so reducing a
/// new vector by scanning rows in insertion order and XOR-ing whenever the
/// row's pivot bit is set leaves a vector with no earlier pivot.
#[derive(Debug, Clone)]
pub struct Gf2Basis {
    words: usize,
    rows: Vec<Row>,
    inserted: usize,
    track: bool,
    scratch: Vec<u64>,
    scratch_combo: Vec<u64>,
}

impl Gf2Basis {
    /// Basis without combination bookkeeping.
    pub fn new(dim: usize) -> Self {
        Self::with_tracking(dim, false)
    }

    /// Basis that records, for each row, which inserted vectors it is the
    /// XOR of, so dependent insertions yield a zero-subset witness.
    pub fn with_witnesses(dim: usize) -> Self {
        Self::with_tracking(dim, true)
    }

    fn with_tracking(dim: usize, track: bool) -> Self {
        let words = dim.div_ceil(64);
        Self {
            words,
            rows: Vec::new(),
            inserted: 0,
            track,
            scratch: vec![0; words],
            scratch_combo: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.rows.clear();
        self.inserted = 0;
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors inserted so far.
    pub fn len(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    pub fn insert(&mut self, v: &[u64]) -> Insertion {
        assert_eq!(v.len(), self.words, "vector width");
        let index = self.inserted;
        self.inserted += 1;
        self.scratch.copy_from_slice(v);
        if self.track {
            self.scratch_combo.clear();
            self.scratch_combo.resize(self.inserted.div_ceil(64), 0);
            self.scratch_combo[index / 64] |= 1 << (index % 64);
        }
        for row in &self.rows {
            if self.scratch[row.pivot / 64] >> (row.pivot % 64) & 1 == 1 {
                for (a, b) in self.scratch.iter_mut().zip(&row.bits) {
                    *a ^= b;
                }
                if self.track {
                    for (a, b) in self.scratch_combo.iter_mut().zip(&row.combo) {
                        *a ^= b;
                    }
                }
            }
        }
        match self.scratch.iter().position(|&w| w != 0) {
            Some(i) => {
                let pivot = i * 64 + self.scratch[i].trailing_zeros() as usize;
                self.rows.push(Row {
                    bits: self.scratch.clone(),
                    pivot,
                    combo: if self.track { self.scratch_combo.clone() } else { Vec::new() },
                });
                Insertion::Independent
            }
            None => {
                let witness = if self.track {
                    (0..self.inserted)
                        .filter(|&j| self.scratch_combo[j / 64] >> (j % 64) & 1 == 1)
                        .collect()
                } else {
                    Vec::new()
                };
                Insertion::Dependent(witness)
            }
        }
    }
}

fn common_layout(ys: &[GenKey]) -> Result<Option<&Arc<KeyLayout>>> {
    let Some(first) = ys.first() else {
        return Ok(None);
    };
    for y in &ys[1..] {
        first.check_same(y)?;
    }
    Ok(Some(&first.layout))
}

pub fn rank(ys: &[GenKey]) -> Result<usize> {
    let Some(layout) = common_layout(ys)? else {
        return Ok(0);
    };
    let mut basis = Gf2Basis::new(layout.dim());
    for y in ys {
        basis.insert(&y.bits);
    }
    Ok(basis.rank())
}

/// Whether no non-empty subset of `ys` is a zero-set. The empty set is
/// independent.
pub fn is_linearly_independent(ys: &[GenKey]) -> Result<bool> {
    Ok(rank(ys)? == ys.len())
}

/// Indices of a non-empty zero subset of `ys`: the first vector (in order)
/// that reduces to zero together with the earlier vectors it combines.
pub fn find_zero_subset(ys: &[GenKey]) -> Result<Vec<usize>> {
    let Some(layout) = common_layout(ys)? else {
        return Err(Error::Independent);
    };
    let mut basis = Gf2Basis::with_witnesses(layout.dim());
    for y in ys {
        if let Insertion::Dependent(w) = basis.insert(&y.bits) {
            return Ok(w);
        }
    }
    Err(Error::Independent)
}

/// Reusable scratch space for checking whether the derived keys of a key
/// set are linearly independent, one hash function at a time.
#[derive(Debug, Clone)]
pub struct DerivedIndependence {
    layout: KeyLayout,
    basis: Gf2Basis,
    chars: Vec<u32>,
    vec: Vec<u64>,
}

impl DerivedIndependence {
    pub fn new(spec: &TornadoSpec) -> Self {
        let layout = KeyLayout::for_derived(spec);
        let basis = Gf2Basis::new(layout.dim());
        let chars = vec![0; layout.positions()];
        let vec = vec![0; layout.words()];
        Self {
            layout,
            basis,
            chars,
            vec,
        }
    }

    /// Whether `h`'s derived keys of `keys` are linearly independent.
    /// Stops at the first dependent key.
    pub fn check(&mut self, h: &TornadoHash, keys: &[u64]) -> bool {
        debug_assert_eq!(self.layout, KeyLayout::for_derived(h.spec()));
        self.basis.clear();
        for &x in keys {
            h.derive_into(x, &mut self.chars);
            self.layout.encode_into(&self.chars, &mut self.vec);
            if let Insertion::Dependent(_) = self.basis.insert(&self.vec) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn keys(layout: &Arc<KeyLayout>, xs: &[u64]) -> Vec<GenKey> {
        xs.iter().map(|&x| GenKey::from_key(layout.clone(), x)).collect()
    }

    fn brute_dependent(ys: &[GenKey]) -> bool {
        let n = ys.len();
        (1u32..(1 << n)).any(|mask| {
            let sub: Vec<GenKey> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ys[i].clone()).collect();
            is_zero_set(&sub).unwrap()
        })
    }

    #[test]
    fn genkey_encoding() {
        let l = Arc::new(KeyLayout::uniform(2, 1));
        let k = GenKey::from_key(l.clone(), 0b10);
        assert_eq!(k.pairs(), vec![(0, 0), (1, 1)]);
        assert_eq!(k.count(), 2);
        let l8 = Arc::new(KeyLayout::uniform(4, 8));
        for x in [0u64, 0xdead_beef, 0xffff_ffff] {
            assert_eq!(GenKey::from_key(l8.clone(), x).count(), 4);
        }
        let x = GenKey::from_key(l8.clone(), 0x1234_5678);
        let y = GenKey::from_key(l8.clone(), 0x1234_9978);
        assert_eq!(x.xor(&y).unwrap(), diff_key(&x, &y, 4).unwrap());
    }

    #[test]
    fn diff_key_cases() {
        let l = Arc::new(KeyLayout::uniform(2, 1));
        // key "ab" means x_1 = a, x_2 = b; keys 00 and 01 differ in position 2
        let k00 = GenKey::from_chars(l.clone(), &[0, 0]);
        let k01 = GenKey::from_chars(l.clone(), &[0, 1]);
        assert!(diff_key(&k00, &k00, 2).unwrap().is_empty());
        assert!(diff_key(&k00, &k01, 0).unwrap().is_empty());
        assert!(diff_key(&k00, &k01, 1).unwrap().is_empty());
        assert_eq!(diff_key(&k00, &k01, 2).unwrap().pairs(), vec![(1, 0), (1, 1)]);
        let other = GenKey::from_chars(Arc::new(KeyLayout::uniform(3, 1)), &[0, 0, 0]);
        assert!(matches!(diff_key(&k00, &other, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn diff_key_masks_inside_a_word() {
        let l = Arc::new(KeyLayout::uniform(3, 5)); // 96 bits, position 3 straddles words
        let x = GenKey::from_chars(l.clone(), &[1, 2, 3]);
        let y = GenKey::from_chars(l.clone(), &[4, 2, 30]);
        assert_eq!(diff_key(&x, &y, 2).unwrap().pairs(), vec![(0, 1), (0, 4)]);
        assert_eq!(diff_key(&x, &y, 3).unwrap().pairs(), vec![(0, 1), (0, 4), (2, 3), (2, 30)]);
    }

    #[test]
    fn zero_sets() {
        let l = Arc::new(KeyLayout::uniform(2, 1));
        let four = keys(&l, &[0b00, 0b01, 0b10, 0b11]);
        assert!(is_zero_set(&four).unwrap());
        assert!(!is_zero_set(&four[..3]).unwrap());
        assert_eq!(is_zero_set(&[]), Err(Error::EmptySet));
        let l8 = Arc::new(KeyLayout::uniform(2, 8));
        for (c1, c2) in [(0u32, 1u32), (3, 200), (254, 255)] {
            let y: Vec<GenKey> = [[0, c1], [1, c1], [0, c2], [1, c2]]
                .iter()
                .map(|ch| GenKey::from_chars(l8.clone(), ch))
                .collect();
            assert!(is_zero_set(&y).unwrap());
        }
    }

    #[test]
    fn rank_of_full_square() {
        let l = Arc::new(KeyLayout::uniform(2, 1));
        let four = keys(&l, &[0b00, 0b01, 0b10, 0b11]);
        assert_eq!(rank(&four).unwrap(), 3);
        assert!(!is_linearly_independent(&four).unwrap());
        assert!(brute_dependent(&four));
        assert!(is_linearly_independent(&four[..1]).unwrap());
        assert!(is_linearly_independent(&[]).unwrap());
        let w = find_zero_subset(&four).unwrap();
        assert_eq!(w, vec![0, 1, 2, 3]);
        // no proper subset is a zero-set
        for drop in 0..4 {
            let sub: Vec<GenKey> = (0..4).filter(|&i| i != drop).map(|i| four[i].clone()).collect();
            assert!(!brute_dependent(&sub));
        }
    }

    #[test]
    fn witness_for_constructed_dependency() {
        let l = Arc::new(KeyLayout::uniform(3, 3));
        let mut ys = keys(&l, &[0o123, 0o456, 0o701, 0o222]);
        assert!(is_linearly_independent(&ys).unwrap());
        assert_eq!(find_zero_subset(&ys), Err(Error::Independent));
        let combo = ys[0].xor(&ys[2]).unwrap().xor(&ys[3]).unwrap();
        ys.push(combo);
        let w = find_zero_subset(&ys).unwrap();
        assert!(w.contains(&4));
        assert_eq!(w, vec![0, 2, 3, 4]);
        let sub: Vec<GenKey> = w.iter().map(|&i| ys[i].clone()).collect();
        assert!(is_zero_set(&sub).unwrap());
    }

    #[test]
    fn untracked_basis_reports_empty_witness() {
        let mut b = Gf2Basis::new(64);
        assert_eq!(b.insert(&[0b11]), Insertion::Independent);
        assert_eq!(b.insert(&[0b01]), Insertion::Independent);
        assert_eq!(b.insert(&[0b10]), Insertion::Dependent(vec![]));
        assert_eq!((b.rank(), b.len()), (2, 3));
        b.clear();
        assert!(b.is_empty());
    }

    fn small_sets() -> impl Strategy<Value = (u32, usize, Vec<Vec<(usize, u32)>>)> {
        (1u32..=2, 1usize..=3).prop_flat_map(|(bits, positions)| {
            let pair = (0..positions, 0..(1u32 << bits));
            let key = prop::collection::vec(pair, 1..=4);
            (Just(bits), Just(positions), prop::collection::vec(key, 1..=8))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn elimination_matches_brute_force((bits, positions, sets) in small_sets()) {
            let l = Arc::new(KeyLayout::uniform(positions, bits));
            let ys: Vec<GenKey> = sets.iter().map(|p| GenKey::from_pairs(l.clone(), p)).collect();
            let r = rank(&ys).unwrap();
            prop_assert!(r <= ys.len().min(l.dim()));
            prop_assert_eq!(is_linearly_independent(&ys).unwrap(), !brute_dependent(&ys));
            if let Ok(w) = find_zero_subset(&ys) {
                let sub: Vec<GenKey> = w.iter().map(|&i| ys[i].clone()).collect();
                prop_assert!(is_zero_set(&sub).unwrap());
            }
            let mut rev = ys.clone();
            rev.reverse();
            prop_assert_eq!(rank(&rev).unwrap(), r);
        }
    }
}
