//! Folded lookup tables: every table for an 8-bit derived position packs,
//! low to high, the contributions to all later derived characters followed by
//! the top-table output, so evaluation is one lookup per position plus
//! shifts and XORs.
//!
//! Two word profiles exist:
//!
//! * `W64`: 8-bit characters, `u64` words. Covers simple tabulation, simple
//!   tornado and tornado whenever `8 (d + 1) + out_bits <= 64`.
//! * `W128`: tornado-mix with 8-bit characters and 16-bit tail characters,
//!   `u128` words for the `c + d - 2` narrow positions and two `u64` tables of
//!   `2^16` entries for the wide tail.

use crate::error::{config, Result};
use crate::hash::TornadoHash;
use crate::spec::{TornadoSpec, Variant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoldedTables {
    W64 {
        c: usize,
        d: usize,
        out_mask: u64,
        tables: Vec<[u64; 256]>,
    },
    W128 {
        c: usize,
        d: usize,
        out_mask: u64,
        narrow: Vec<[u128; 256]>,
        wide: [Vec<u64>; 2],
    },
}

/// Number of 8-bit derived characters packed at the bottom of the folded
/// entry of 1-based position `p`.
fn narrow_chars_after(c: usize, last_narrow: usize, p: usize) -> usize {
    let start = c.max(p + 1);
    (last_narrow + 1).saturating_sub(start)
}

impl FoldedTables {
    /// Whether `spec` has a folded profile.
    pub fn supports(spec: &TornadoSpec) -> Result<()> {
        spec.validate()?;
        if spec.char_bits != 8 {
            return config("folded tables need 8-bit characters");
        }
        let (c, d, r) = (spec.c, spec.d, spec.out_bits);
        match spec.variant {
            Variant::TornadoMix => {
                if spec.psi_bits != Some(16) {
                    return config("folded tornado-mix needs 16-bit tail characters");
                }
                let widest = if c >= 2 { 8 * (d - 1) } else { 8 * (d - 2) } + 32 + r;
                if widest > 128 {
                    return config(format!("folded tornado-mix entry needs {widest} > 128 bits"));
                }
            }
            _ => {
                let widest = if c >= 2 { 8 * (d + 1) } else { 8 * d } + r;
                if widest > 64 {
                    return config(format!("folded entry needs {widest} > 64 bits"));
                }
            }
        }
        Ok(())
    }

    pub fn new(h: &TornadoHash) -> Result<Self> {
        let spec = *h.spec();
        Self::supports(&spec)?;
        let c = spec.c as usize;
        let d = spec.d as usize;
        let out_mask = spec.out_mask();
        // entry for position p: fields for derived positions j in
        // max(c, p+1)..=last_narrow, then (mix only) two 16-bit tails, then output.
        let level_of = |j: usize| (j - c) as u32;
        let field = |p: usize, j: usize, ch: usize| -> u64 {
            // contribution of position p, character ch, to derived position j
            let t = h.level_table(level_of(j), p);
            t.get(ch).copied().unwrap_or(0) as u64
        };
        match spec.variant {
            Variant::TornadoMix => {
                let last_narrow = c + d - 2;
                let mut narrow = Vec::with_capacity(last_narrow);
                for p in 1..=last_narrow {
                    let mut t = [0u128; 256];
                    let start = c.max(p + 1);
                    let n_chars = narrow_chars_after(c, last_narrow, p);
                    for (ch, e) in t.iter_mut().enumerate() {
                        let mut w = 0u128;
                        for (k, j) in (start..=last_narrow).enumerate() {
                            w |= (field(p, j, ch) as u128) << (8 * k);
                        }
                        let tail = 8 * n_chars;
                        w |= (field(p, c + d - 1, ch) as u128) << tail;
                        w |= (field(p, c + d, ch) as u128) << (tail + 16);
                        w |= (h.top_table(p)[ch] as u128) << (tail + 32);
                        *e = w;
                    }
                    narrow.push(t);
                }
                let wide = [h.top_table(c + d - 1).to_vec(), h.top_table(c + d).to_vec()];
                Ok(FoldedTables::W128 {
                    c,
                    d,
                    out_mask,
                    narrow,
                    wide,
                })
            }
            _ => {
                let last = c + d;
                let mut tables = Vec::with_capacity(last);
                for p in 1..=last {
                    let mut t = [0u64; 256];
                    let start = c.max(p + 1);
                    let n_chars = narrow_chars_after(c, last, p);
                    for (ch, e) in t.iter_mut().enumerate() {
                        let mut w = 0u64;
                        for (k, j) in (start..=last).enumerate() {
                            w |= field(p, j, ch) << (8 * k);
                        }
                        w |= h.top_table(p)[ch] << (8 * n_chars);
                        *e = w;
                    }
                    tables.push(t);
                }
                Ok(FoldedTables::W64 {
                    c,
                    d,
                    out_mask,
                    tables,
                })
            }
        }
    }

    /// Evaluates the folded hash. Agrees with [`TornadoHash::eval`].
    #[inline]
    pub fn eval(&self, mut x: u64) -> u64 {
        match self {
            FoldedTables::W64 {
                c,
                d,
                out_mask,
                tables,
            } => {
                let mut h = 0u64;
                for t in &tables[..c - 1] {
                    h ^= t[(x & 0xff) as usize];
                    x >>= 8;
                }
                h ^= x;
                for t in &tables[c - 1..c + d] {
                    let ch = (h & 0xff) as usize;
                    h >>= 8;
                    h ^= t[ch];
                }
                h & out_mask
            }
            FoldedTables::W128 {
                c,
                d,
                out_mask,
                narrow,
                wide,
            } => {
                let mut h = 0u128;
                for t in &narrow[..c - 1] {
                    h ^= t[(x & 0xff) as usize];
                    x >>= 8;
                }
                h ^= x as u128;
                for t in &narrow[c - 1..c + d - 2] {
                    let ch = (h & 0xff) as usize;
                    h >>= 8;
                    h ^= t[ch];
                }
                let b1 = (h & 0xffff) as usize;
                h >>= 16;
                let b2 = (h & 0xffff) as usize;
                h >>= 16;
                ((h as u64) ^ wide[0][b1] ^ wide[1][b2]) & out_mask
            }
        }
    }

    /// Number of table lookups per evaluation.
    pub fn lookups(&self) -> usize {
        match self {
            FoldedTables::W64 { tables, .. } => tables.len(),
            FoldedTables::W128 { narrow, .. } => narrow.len() + 2,
        }
    }
}

impl TornadoHash {
    pub fn fold(&self) -> Result<FoldedTables> {
        FoldedTables::new(self)
    }
}
