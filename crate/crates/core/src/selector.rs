//! Selector functions: which keys get selected, based on the key, the
//! selection bits of its hash and the selection bits of the query keys.
//!
//! Only analytic families are provided, for which the expected selected-set
//! size `μ` under a fully-random hash has a closed form. For every family
//! `p_x` does not depend on the query hashes, so the max over query-hash
//! assignments is attained by any assignment.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::gf2::DerivedIndependence;
use crate::hash::{BitSplit, TornadoHash};
use crate::spec::mask;

/// Target of a [`SelectorKind::Bin`] selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinTarget {
    Fixed(#[serde(with = "hex_key")] u64),
    /// The bin of the (single) query key.
    Query,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SelectorKind {
    /// Selects exactly `keys`, independent of the hash.
    FixedSet {
        #[serde(with = "hex_keys")]
        keys: Vec<u64>,
    },
    /// Selects `x ∈ base` whose `select_bits` high hash bits are in
    /// `targets`; with `relative_to_query` the targets are offsets (mod
    /// `2^select_bits`) from the query's selection bits.
    BitPrefix {
        #[serde(with = "hex_keys")]
        base: Vec<u64>,
        select_bits: u32,
        targets: Vec<u64>,
        #[serde(default)]
        relative_to_query: bool,
    },
    /// Selects `x ∈ base` hashing into the dyadic interval of length
    /// `2^interval_bits` containing the query's hash, or either neighbour.
    DyadicInterval {
        #[serde(with = "hex_keys")]
        base: Vec<u64>,
        interval_bits: u32,
    },
    /// Selects `x ∈ base` whose full hash equals the bin.
    Bin {
        #[serde(with = "hex_keys")]
        base: Vec<u64>,
        bin: BinTarget,
    },
}

/// An s-selector over `out_bits`-bit hash values, with query keys that are
/// always selected.
///
/// Construction normalizes the candidate set: it is sorted, deduplicated and
/// made disjoint from the queries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSelector")]
pub struct Selector {
    #[serde(flatten)]
    kind: SelectorKind,
    #[serde(with = "hex_keys")]
    queries: Vec<u64>,
    out_bits: u32,
}

#[derive(Deserialize)]
struct RawSelector {
    #[serde(flatten)]
    kind: SelectorKind,
    #[serde(default, with = "hex_keys")]
    queries: Vec<u64>,
    out_bits: u32,
}

impl TryFrom<RawSelector> for Selector {
    type Error = crate::error::Error;

    fn try_from(raw: RawSelector) -> Result<Self> {
        Selector::new(raw.kind, raw.queries, raw.out_bits)
    }
}

impl Selector {
    pub fn new(mut kind: SelectorKind, queries: Vec<u64>, out_bits: u32) -> Result<Self> {
        let mut queries = queries;
        queries.sort_unstable();
        queries.dedup();
        let base = match &mut kind {
            SelectorKind::FixedSet { keys } => keys,
            SelectorKind::BitPrefix { base, .. }
            | SelectorKind::DyadicInterval { base, .. }
            | SelectorKind::Bin { base, .. } => base,
        };
        base.sort_unstable();
        base.dedup();
        base.retain(|x| queries.binary_search(x).is_err());
        let sel = Self {
            kind,
            queries,
            out_bits,
        };
        sel.validate()?;
        Ok(sel)
    }

    pub fn kind(&self) -> &SelectorKind {
        &self.kind
    }

    /// Query keys, sorted.
    pub fn queries(&self) -> &[u64] {
        &self.queries
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn fixed_set(keys: Vec<u64>, out_bits: u32) -> Result<Self> {
        Self::new(SelectorKind::FixedSet { keys }, Vec::new(), out_bits)
    }

    /// Keys of `base` whose full hash is `bin`.
    pub fn bin(base: Vec<u64>, bin: u64, out_bits: u32) -> Result<Self> {
        Self::new(
            SelectorKind::Bin {
                base,
                bin: BinTarget::Fixed(bin),
            },
            Vec::new(),
            out_bits,
        )
    }

    /// Keys of `base` whose top `select_bits` hash bits are zero. With
    /// `base = {0,1} × Σ` and two selection bits this is the lower-bound hard
    /// instance.
    pub fn top_bits_zero(base: Vec<u64>, select_bits: u32, out_bits: u32) -> Result<Self> {
        Self::new(
            SelectorKind::BitPrefix {
                base,
                select_bits,
                targets: vec![0],
                relative_to_query: false,
            },
            Vec::new(),
            out_bits,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=64).contains(&self.out_bits) {
            return config("selector out_bits must be in 1..=64");
        }
        let needs_query = match &self.kind {
            SelectorKind::FixedSet { .. } => false,
            SelectorKind::BitPrefix {
                select_bits,
                targets,
                relative_to_query,
                ..
            } => {
                if *select_bits > self.out_bits {
                    return config("select_bits exceeds out_bits");
                }
                if targets.iter().any(|&t| t > mask(*select_bits)) {
                    return config("prefix target wider than select_bits");
                }
                *relative_to_query
            }
            SelectorKind::DyadicInterval { interval_bits, .. } => {
                if interval_bits + 2 > self.out_bits {
                    return config("dyadic intervals need at least two selection bits");
                }
                true
            }
            SelectorKind::Bin { bin, .. } => match bin {
                BinTarget::Fixed(v) => {
                    if *v > mask(self.out_bits) {
                        return config("bin value exceeds out_bits");
                    }
                    false
                }
                BinTarget::Query => true,
            },
        };
        if needs_query && self.queries.len() != 1 {
            return config("query-relative selectors need exactly one query key");
        }
        Ok(())
    }

    /// Number of high-order hash bits the selector looks at.
    pub fn select_bits(&self) -> u32 {
        match &self.kind {
            SelectorKind::FixedSet { .. } => 0,
            SelectorKind::BitPrefix { select_bits, .. } => *select_bits,
            SelectorKind::DyadicInterval { interval_bits, .. } => self.out_bits - interval_bits,
            SelectorKind::Bin { .. } => self.out_bits,
        }
    }

    pub fn split(&self) -> BitSplit {
        let s = self.select_bits();
        BitSplit::new(s, self.out_bits - s, self.out_bits).expect("s <= out_bits")
    }

    /// The non-query candidates `S \ Q`, sorted and distinct.
    pub fn candidates(&self) -> &[u64] {
        match &self.kind {
            SelectorKind::FixedSet { keys } => keys,
            SelectorKind::BitPrefix { base, .. }
            | SelectorKind::DyadicInterval { base, .. }
            | SelectorKind::Bin { base, .. } => base,
        }
    }

    /// `μ = Σ_x p_x` with `p_q = 1` for query keys.
    pub fn mu(&self) -> f64 {
        let others = self.candidates().len() as f64;
        let q = self.queries.len() as f64;
        let p = match &self.kind {
            SelectorKind::FixedSet { .. } => 1.0,
            SelectorKind::BitPrefix {
                select_bits,
                targets,
                ..
            } => {
                let distinct: BTreeSet<_> = targets.iter().collect();
                distinct.len() as f64 / (*select_bits as f64).exp2()
            }
            SelectorKind::DyadicInterval { interval_bits, .. } => {
                3.0 * (*interval_bits as f64).exp2() / (self.out_bits as f64).exp2()
            }
            SelectorKind::Bin { .. } => 1.0 / (self.out_bits as f64).exp2(),
        };
        others * p + q
    }

    /// Size of the base population `S ∪ Q`.
    pub fn population(&self) -> usize {
        self.candidates().len() + self.queries.len()
    }

    /// The selected set under an arbitrary `out_bits`-bit hash function,
    /// sorted. Only the selection bits of `hash` are consulted.
    pub fn select_by(&self, hash: impl Fn(u64) -> u64) -> Vec<u64> {
        let split = self.split();
        let sel = |x: u64| split.select(hash(x));
        let s_mask = mask(self.select_bits());
        let query_sel = self.queries.first().map(|&q| sel(q));
        let pred: Box<dyn Fn(u64) -> bool + '_> = match &self.kind {
            SelectorKind::FixedSet { .. } => Box::new(|_| true),
            SelectorKind::BitPrefix {
                targets,
                relative_to_query,
                ..
            } => {
                let origin = if *relative_to_query { query_sel.unwrap_or(0) } else { 0 };
                Box::new(move |x| {
                    let v = sel(x).wrapping_sub(origin) & s_mask;
                    targets.contains(&v)
                })
            }
            SelectorKind::DyadicInterval { .. } => {
                let j = query_sel.unwrap_or(0);
                Box::new(move |x| {
                    let off = sel(x).wrapping_sub(j) & s_mask;
                    off == 0 || off == 1 || off == s_mask
                })
            }
            SelectorKind::Bin { bin, .. } => {
                let target = match bin {
                    BinTarget::Fixed(v) => *v,
                    BinTarget::Query => query_sel.unwrap_or(0),
                };
                Box::new(move |x| sel(x) == target)
            }
        };
        let mut out: Vec<u64> = self.candidates().iter().copied().filter(|&x| pred(x)).collect();
        out.extend(&self.queries);
        out.sort_unstable();
        out
    }

    /// `X^{f,h}`.
    pub fn select(&self, h: &TornadoHash) -> Result<Vec<u64>> {
        if h.spec().out_bits != self.out_bits {
            return config(format!(
                "selector expects {}-bit hashes, hash function has {}",
                self.out_bits,
                h.spec().out_bits
            ));
        }
        Ok(self.select_by(|x| h.eval(x)))
    }

    /// Whether the derived keys of the selected set are linearly independent.
    pub fn selected_derived_independent(&self, h: &TornadoHash) -> Result<bool> {
        let selected = self.select(h)?;
        Ok(DerivedIndependence::new(h.spec()).check(h, &selected))
    }
}

mod hex_key {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:#x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }

    pub fn parse(s: &str) -> Result<u64, String> {
        let digits = s.strip_prefix("0x").unwrap_or(s);
        u64::from_str_radix(digits, 16).map_err(|e| format!("bad hex key `{s}`: {e}"))
    }
}

mod hex_keys {
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for k in v {
            seq.serialize_element(&format!("{k:#x}"))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::hex_key::parse(s).map_err(D::Error::custom))
            .collect()
    }
}

/// `{0, 1} × Σ` for `c = 2`: first character in `{0, 1}`, second arbitrary.
pub fn hard_instance_keys(char_bits: u32) -> Vec<u64> {
    (0..1u64 << char_bits)
        .flat_map(|ch| [ch << char_bits, (ch << char_bits) | 1])
        .collect()
}
