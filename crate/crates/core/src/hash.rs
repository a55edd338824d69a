//! Tornado tabulation hash functions: table generation, derived keys and
//! evaluation on the reference path.

use std::collections::HashSet;

use crate::error::{config, Result};
use crate::prg::{level_table_id, top_table_id, TableStream, FIELD_LEVEL, FIELD_TOP};
use crate::spec::{mask, TornadoSpec};

/// Per-level character tables, flattened as `entries[pos * |Σ| + ch]`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    inputs: usize,
    entries: Vec<u32>,
}

/// The `c + d` characters of a derived key. The last two are wider for
/// tornado-mix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivedKey(pub Vec<u32>);

impl DerivedKey {
    pub fn chars(&self) -> &[u32] {
        &self.0
    }
}

/// Partition of the `out_bits` hash bits into `s` high selection bits and
/// `t` low free bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitSplit {
    s: u32,
    t: u32,
}

impl BitSplit {
    pub fn new(s: u32, t: u32, out_bits: u32) -> Result<Self> {
        if s + t != out_bits {
            return config(format!("s + t = {} but out_bits = {out_bits}", s + t));
        }
        Ok(Self { s, t })
    }

    pub fn select_bits(&self) -> u32 {
        self.s
    }

    pub fn free_bits(&self) -> u32 {
        self.t
    }

    #[inline]
    pub fn select(&self, hash: u64) -> u64 {
        if self.t >= 64 {
            0
        } else {
            hash >> self.t
        }
    }

    #[inline]
    pub fn free(&self, hash: u64) -> u64 {
        hash & mask(self.t)
    }
}

/// An instantiated hash function. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TornadoHash {
    spec: TornadoSpec,
    seed: u64,
    levels: Vec<Level>,
    top: Vec<u64>,
    top_offsets: Vec<usize>,
}

impl TornadoHash {
    /// Fills every table from the counter-mode generator in [`crate::prg`].
    pub fn build(spec: TornadoSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let sigma = spec.sigma_size() as usize;
        let levels = (0..=spec.d)
            .map(|level| {
                if !spec.level_present(level) {
                    return Level {
                        inputs: 0,
                        entries: Vec::new(),
                    };
                }
                let inputs = spec.level_inputs(level);
                let value_mask = mask(spec.level_value_bits(level));
                let mut entries = Vec::with_capacity(inputs * sigma);
                for pos in 0..inputs {
                    let stream = TableStream::new(seed, level_table_id(level, pos as u32 + 1), FIELD_LEVEL);
                    entries.extend((0..sigma as u64).map(|ch| (stream.draw(ch) & value_mask) as u32));
                }
                Level { inputs, entries }
            })
            .collect();

        let out_mask = spec.out_mask();
        let (top_offsets, total) = top_layout(&spec);
        let mut top = Vec::with_capacity(total);
        for pos in 0..spec.derived_len() {
            let size = 1u64 << spec.position_bits(pos + 1);
            let stream = TableStream::new(seed, top_table_id(pos as u32 + 1), FIELD_TOP);
            top.extend((0..size).map(|ch| stream.draw(ch) & out_mask));
        }
        Ok(Self {
            spec,
            seed,
            levels,
            top,
            top_offsets,
        })
    }

    /// Builds a hash function from explicit tables.
    ///
    /// `levels[l][p]` is the level-`l` table of 1-based position `p + 1`
    /// (empty for absent levels); `top[p]` is the top table of position
    /// `p + 1`. Shapes and entry widths are checked.
    pub fn from_tables(
        spec: TornadoSpec,
        seed: u64,
        levels: Vec<Vec<Vec<u32>>>,
        top: Vec<Vec<u64>>,
    ) -> Result<Self> {
        spec.validate()?;
        let sigma = spec.sigma_size() as usize;
        if levels.len() != spec.d as usize + 1 {
            return config(format!("expected {} levels, got {}", spec.d + 1, levels.len()));
        }
        let mut packed = Vec::with_capacity(levels.len());
        for (level, tables) in levels.into_iter().enumerate() {
            let level = level as u32;
            let inputs = if spec.level_present(level) {
                spec.level_inputs(level)
            } else {
                0
            };
            if tables.len() != inputs {
                return config(format!(
                    "level {level} needs {inputs} tables, got {}",
                    tables.len()
                ));
            }
            let value_mask = mask(spec.level_value_bits(level));
            let mut entries = Vec::with_capacity(inputs * sigma);
            for t in tables {
                if t.len() != sigma {
                    return config(format!("level {level} table has {} entries, need {sigma}", t.len()));
                }
                if t.iter().any(|&v| v as u64 & !value_mask != 0) {
                    return config(format!("level {level} entry exceeds its bit width"));
                }
                entries.extend(t);
            }
            packed.push(Level { inputs, entries });
        }
        if top.len() != spec.derived_len() {
            return config(format!("expected {} top tables, got {}", spec.derived_len(), top.len()));
        }
        let (top_offsets, total) = top_layout(&spec);
        let mut flat = Vec::with_capacity(total);
        for (pos, t) in top.into_iter().enumerate() {
            let size = 1usize << spec.position_bits(pos + 1);
            if t.len() != size {
                return config(format!("top table {} has {} entries, need {size}", pos + 1, t.len()));
            }
            if t.iter().any(|&v| v & !spec.out_mask() != 0) {
                return config("top entry exceeds out_bits");
            }
            flat.extend(t);
        }
        Ok(Self {
            spec,
            seed,
            levels: packed,
            top: flat,
            top_offsets,
        })
    }

    /// Inverse of [`TornadoHash::from_tables`].
    pub fn to_tables(&self) -> (Vec<Vec<Vec<u32>>>, Vec<Vec<u64>>) {
        let sigma = self.spec.sigma_size() as usize;
        let levels = self
            .levels
            .iter()
            .map(|l| l.entries.chunks(sigma.max(1)).map(<[u32]>::to_vec).collect())
            .collect();
        let top = (0..self.spec.derived_len())
            .map(|p| self.top_table(p + 1).to_vec())
            .collect();
        (levels, top)
    }

    pub fn spec(&self) -> &TornadoSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Level `level` table of 1-based `position`; empty if the level has no
    /// table there.
    pub fn level_table(&self, level: u32, position: usize) -> &[u32] {
        let sigma = self.spec.sigma_size() as usize;
        let l = &self.levels[level as usize];
        if position == 0 || position > l.inputs {
            return &[];
        }
        &l.entries[(position - 1) * sigma..position * sigma]
    }

    /// Top simple-tabulation table of 1-based `position`.
    pub fn top_table(&self, position: usize) -> &[u64] {
        &self.top[self.top_offsets[position - 1]..self.top_offsets[position]]
    }

    /// Writes the derived key of `x` into `out[..c + d]`.
    #[inline]
    pub fn derive_into(&self, x: u64, out: &mut [u32]) {
        let spec = &self.spec;
        let c = spec.c as usize;
        let cb = spec.char_bits;
        let sigma = spec.sigma_size() as usize;
        let char_mask = mask(cb);
        for (i, slot) in out.iter_mut().take(c).enumerate() {
            *slot = ((x >> (i as u32 * cb)) & char_mask) as u32;
        }
        for (level, l) in self.levels.iter().enumerate() {
            let mut acc = 0u32;
            for (pos, &ch) in out[..l.inputs].iter().enumerate() {
                acc ^= l.entries[pos * sigma + ch as usize];
            }
            if level == 0 {
                // x̃_c = x_c ⊕ h̃_0(x̃_1..x̃_{c-1}); the empty-prefix case is 0.
                out[c - 1] ^= acc;
            } else {
                out[c + level - 1] = acc;
            }
        }
    }

    pub fn derive(&self, x: u64) -> DerivedKey {
        let mut out = vec![0u32; self.spec.derived_len()];
        self.derive_into(x, &mut out);
        DerivedKey(out)
    }

    /// Top simple tabulation applied to an already derived key.
    #[inline]
    pub fn eval_derived(&self, derived: &[u32]) -> u64 {
        derived
            .iter()
            .zip(&self.top_offsets)
            .fold(0, |acc, (&ch, &off)| acc ^ self.top[off + ch as usize])
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let mut buf = [0u32; 130];
        let n = self.spec.derived_len();
        self.derive_into(x, &mut buf[..n]);
        self.eval_derived(&buf[..n])
    }

    pub fn select_bits(&self, x: u64, split: BitSplit) -> u64 {
        split.select(self.eval(x))
    }

    pub fn free_bits(&self, x: u64, split: BitSplit) -> u64 {
        split.free(self.eval(x))
    }

    /// Whether `derive` is injective on `keys`.
    pub fn derived_injectivity_check(&self, keys: &[u64]) -> bool {
        let n = self.spec.derived_len();
        let total_bits: u32 = (1..=n).map(|p| self.spec.position_bits(p)).sum();
        let mut buf = vec![0u32; n];
        if total_bits <= 128 {
            let mut packed: Vec<u128> = keys
                .iter()
                .map(|&x| {
                    self.derive_into(x, &mut buf);
                    let mut w = 0u128;
                    let mut shift = 0;
                    for (p, &ch) in buf.iter().enumerate() {
                        w |= (ch as u128) << shift;
                        shift += self.spec.position_bits(p + 1);
                    }
                    w
                })
                .collect();
            packed.sort_unstable();
            packed.windows(2).all(|w| w[0] != w[1])
        } else {
            let mut seen = HashSet::with_capacity(keys.len());
            keys.iter().all(|&x| seen.insert(self.derive(x)))
        }
    }

    /// Exhaustively checks that `x ↦ x̃_1..x̃_c` is a bijection on `Σ^c`.
    /// Only available for universes of at most 2^24 keys.
    pub fn twist_is_bijective(&self) -> Result<bool> {
        let bits = self.spec.key_bits();
        if bits > 24 {
            return config(format!("exhaustive twist check limited to 24-bit keys, got {bits}"));
        }
        let c = self.spec.c as usize;
        let mut seen = vec![0u64; (1usize << bits).div_ceil(64)];
        let mut buf = vec![0u32; self.spec.derived_len()];
        for x in 0..(1u64 << bits) {
            self.derive_into(x, &mut buf);
            let mut prefix = 0usize;
            for (i, &ch) in buf[..c].iter().enumerate() {
                prefix |= (ch as usize) << (i as u32 * self.spec.char_bits);
            }
            let (w, b) = (prefix / 64, prefix % 64);
            if seen[w] >> b & 1 == 1 {
                return Ok(false);
            }
            seen[w] |= 1 << b;
        }
        Ok(true)
    }
}

fn top_layout(spec: &TornadoSpec) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(spec.derived_len() + 1);
    let mut total = 0usize;
    offsets.push(0);
    for pos in 0..spec.derived_len() {
        total += 1usize << spec.position_bits(pos + 1);
        offsets.push(total);
    }
    (offsets, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Second transcription of the tornado recurrence, written against the
    /// table accessors only.
    fn derive_oracle(h: &TornadoHash, x: u64) -> Vec<u32> {
        let s = h.spec();
        let c = s.c as usize;
        let d = s.d as usize;
        let key_chars: Vec<u32> = (0..c)
            .map(|i| ((x >> (i as u32 * s.char_bits)) & ((1 << s.char_bits) - 1)) as u32)
            .collect();
        let mut dk: Vec<u32> = Vec::new();
        for i in 1..=c + d {
            let v = if i < c {
                key_chars[i - 1]
            } else if i == c {
                let mut t = 0;
                for p in 1..c {
                    if let Some(&e) = h.level_table(0, p).get(dk[p - 1] as usize) {
                        t ^= e;
                    }
                }
                key_chars[c - 1] ^ t
            } else {
                let level = (i - c) as u32;
                let reads = if s.variant == crate::spec::Variant::TornadoMix && i + 2 > c + d {
                    c + d - 2
                } else {
                    i - 1
                };
                (1..=reads).fold(0, |a, p| a ^ h.level_table(level, p)[dk[p - 1] as usize])
            };
            dk.push(v);
        }
        dk
    }

    #[test]
    fn build_is_deterministic() {
        let spec = TornadoSpec::tornado(8, 4, 4, 24);
        let a = TornadoHash::build(spec, 0x42).unwrap();
        let b = TornadoHash::build(spec, 0x42).unwrap();
        let c = TornadoHash::build(spec, 0x43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.to_tables(), c.to_tables());
        assert_eq!(a.spec().lookup_table_count(), 8);
    }

    #[test]
    fn entries_fit_their_widths() {
        let spec = TornadoSpec::tornado_mix(4, 3, 3, 13, 6);
        let h = TornadoHash::build(spec, 9).unwrap();
        let (levels, top) = h.to_tables();
        for (l, tables) in levels.iter().enumerate() {
            let m = mask(spec.level_value_bits(l as u32)) as u32;
            assert!(tables.iter().flatten().all(|&v| v & !m == 0));
        }
        for (p, t) in top.iter().enumerate() {
            assert_eq!(t.len(), 1 << spec.position_bits(p + 1));
            assert!(t.iter().all(|&v| v < 1 << 13));
        }
        assert_eq!(TornadoHash::from_tables(spec, 9, levels, top).unwrap(), h);
    }

    #[test]
    fn from_tables_rejects_wide_entries() {
        let spec = TornadoSpec::tornado(2, 2, 1, 4);
        let h = TornadoHash::build(spec, 1).unwrap();
        let (mut levels, top) = h.to_tables();
        levels[1][0][0] = 4;
        assert!(TornadoHash::from_tables(spec, 1, levels, top.clone()).is_err());
        let (levels, mut top2) = h.to_tables();
        top2[0][0] = 16;
        assert!(TornadoHash::from_tables(spec, 1, levels, top2).is_err());
    }

    #[test]
    fn small_universe_matches_transcription() {
        let spec = TornadoSpec::tornado(2, 2, 1, 6);
        let h = TornadoHash::build(spec, 0x5eed).unwrap();
        for x in 0..16u64 {
            assert_eq!(h.derive(x).0, derive_oracle(&h, x), "key {x}");
        }
    }

    #[test]
    fn all_variants_match_transcription() {
        let specs = [
            TornadoSpec::tornado(3, 3, 4, 10),
            TornadoSpec::simple_tornado(3, 3, 4, 10),
            TornadoSpec::simple_tabulation(3, 3, 10),
            TornadoSpec::tornado_mix(3, 3, 4, 10, 5),
            TornadoSpec::tornado_mix(3, 2, 2, 10, 3),
            TornadoSpec::tornado(4, 1, 3, 10),
        ];
        for spec in specs {
            for seed in 0..5 {
                let h = TornadoHash::build(spec, seed).unwrap();
                for x in 0..spec.universe_size() {
                    assert_eq!(h.derive(x).0, derive_oracle(&h, x), "{spec} key {x}");
                }
            }
        }
    }

    #[test]
    fn simple_tabulation_is_identity_on_characters() {
        let spec = TornadoSpec::simple_tabulation(4, 3, 12);
        let h = TornadoHash::build(spec, 3).unwrap();
        for x in [0u64, 1, 0xabc, 0xfff] {
            assert_eq!(h.derive(x).0, vec![(x & 15) as u32, (x >> 4 & 15) as u32, (x >> 8) as u32]);
        }
    }

    #[test]
    fn single_character_simple_tabulation_is_one_lookup() {
        let spec = TornadoSpec::simple_tabulation(8, 1, 32);
        let h = TornadoHash::build(spec, 11).unwrap();
        for x in 0..256u64 {
            assert_eq!(h.eval(x), h.top_table(1)[x as usize]);
        }
    }

    #[test]
    fn single_character_tornado_has_no_twist() {
        let spec = TornadoSpec::tornado(8, 1, 2, 16);
        let h = TornadoHash::build(spec, 4).unwrap();
        for x in 0..256u64 {
            assert_eq!(h.derive(x).0[0], x as u32);
        }
    }

    #[test]
    fn prefix_identity_and_twist() {
        let spec = TornadoSpec::tornado(8, 2, 3, 16);
        for seed in 0..4 {
            let h = TornadoHash::build(spec, seed).unwrap();
            for x in (0..65536u64).step_by(97) {
                assert_eq!(h.derive(x).0[0], (x & 255) as u32);
            }
            assert!(h.twist_is_bijective().unwrap());
        }
    }

    #[test]
    fn injectivity_checks() {
        let h = TornadoHash::build(TornadoSpec::tornado(4, 3, 2, 8), 2).unwrap();
        let keys: Vec<u64> = (0..4096).collect();
        assert!(h.derived_injectivity_check(&keys));
        assert!(h.derived_injectivity_check(&[17]));
        let st = TornadoHash::build(TornadoSpec::simple_tabulation(4, 3, 8), 2).unwrap();
        assert!(st.derived_injectivity_check(&keys));
        // wide derived keys take the hash-set route
        let wide = TornadoHash::build(TornadoSpec::tornado(16, 4, 6, 8), 2).unwrap();
        let some: Vec<u64> = (0..2000u64).map(|i| i * 0x1_0001_0001).collect();
        assert!(wide.derived_injectivity_check(&some));
    }

    #[test]
    fn bit_split() {
        let spec = TornadoSpec::tornado(8, 2, 2, 20);
        let h = TornadoHash::build(spec, 77).unwrap();
        assert!(BitSplit::new(3, 16, 20).is_err());
        let all_free = BitSplit::new(0, 20, 20).unwrap();
        let all_sel = BitSplit::new(20, 0, 20).unwrap();
        let mid = BitSplit::new(7, 13, 20).unwrap();
        for x in (0..65536u64).step_by(6) {
            let v = h.eval(x);
            assert_eq!(h.select_bits(x, all_free), 0);
            assert_eq!(h.free_bits(x, all_free), v);
            assert_eq!(h.select_bits(x, all_sel), v);
            assert_eq!((h.select_bits(x, mid) << 13) | h.free_bits(x, mid), v);
        }
        let full = BitSplit::new(0, 64, 64).unwrap();
        assert_eq!(full.select(u64::MAX), 0);
        assert_eq!(full.free(u64::MAX), u64::MAX);
    }

    #[test]
    fn select_bits_are_simple_tabulation_of_top_slices() {
        let spec = TornadoSpec::tornado(4, 3, 3, 12);
        let h = TornadoHash::build(spec, 5).unwrap();
        let split = BitSplit::new(5, 7, 12).unwrap();
        let (levels, top) = h.to_tables();
        let high: Vec<Vec<u64>> = top.iter().map(|t| t.iter().map(|v| v >> 7).collect()).collect();
        let sliced = TornadoHash::from_tables(TornadoSpec { out_bits: 5, ..spec }, 5, levels, high).unwrap();
        for x in 0..spec.universe_size() {
            assert_eq!(h.select_bits(x, split), sliced.eval(x));
        }
    }
}
