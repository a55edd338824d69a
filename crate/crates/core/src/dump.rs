//! Plain-text table dumps for cross-implementation conformance.
//!
//! ```text
//! tornado-tables v1 <spec-string> seed=<hex>
//! <entry>
//! <entry>
//! ...
//! ```
//!
//! Entries are lowercase hex, zero-padded to the hex width of their field,
//! one per line, in canonical order: for each present level `0..=d`, for each
//! input position, for each character; then for each top position
//! `1..=c+d`, for each character. Absent levels (the twist of simple
//! tornado and simple tabulation, or of `c = 1`) contribute no lines.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hash::TornadoHash;
use crate::spec::TornadoSpec;

pub const DUMP_MAGIC: &str = "tornado-tables v1";

fn hex_width(bits: u32) -> usize {
    bits.div_ceil(4) as usize
}

pub fn dump_tables(h: &TornadoHash) -> String {
    let spec = h.spec();
    let mut out = format!("{DUMP_MAGIC} {spec} seed={:x}\n", h.seed());
    for level in (0..=spec.d).filter(|&l| spec.level_present(l)) {
        let w = hex_width(spec.level_value_bits(level));
        for pos in 1..=spec.level_inputs(level) {
            for v in h.level_table(level, pos) {
                let _ = writeln!(out, "{v:0w$x}");
            }
        }
    }
    let w = hex_width(spec.out_bits);
    for pos in 1..=spec.derived_len() {
        for v in h.top_table(pos) {
            let _ = writeln!(out, "{v:0w$x}");
        }
    }
    out
}

/// Parses a dump back into a hash function, validating every entry width.
pub fn parse_dump(text: &str) -> Result<TornadoHash> {
    let bad = |m: &str| Error::Dump(m.to_string());
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty input"))?;
    let rest = header
        .strip_prefix(DUMP_MAGIC)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| bad("missing header"))?;
    let (spec_str, seed_str) = rest.split_once(' ').ok_or_else(|| bad("header lacks seed"))?;
    let spec: TornadoSpec = spec_str.parse()?;
    let seed = seed_str
        .strip_prefix("seed=")
        .and_then(|s| u64::from_str_radix(s, 16).ok())
        .ok_or_else(|| bad("bad seed field"))?;

    let mut next = |bits: u32| -> Result<u64> {
        let line = lines.next().ok_or_else(|| bad("truncated"))?;
        if line.len() != hex_width(bits) || line.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(bad(&format!("entry `{line}` is not {}-digit lowercase hex", hex_width(bits))));
        }
        u64::from_str_radix(line, 16).map_err(|_| bad(&format!("bad hex `{line}`")))
    };

    let sigma = spec.sigma_size() as usize;
    let mut levels = Vec::with_capacity(spec.d as usize + 1);
    for level in 0..=spec.d {
        let mut tables = Vec::new();
        if spec.level_present(level) {
            let bits = spec.level_value_bits(level);
            for _ in 0..spec.level_inputs(level) {
                tables.push((0..sigma).map(|_| next(bits).map(|v| v as u32)).collect::<Result<Vec<_>>>()?);
            }
        }
        levels.push(tables);
    }
    let mut top = Vec::with_capacity(spec.derived_len());
    for pos in 1..=spec.derived_len() {
        let size = 1usize << spec.position_bits(pos);
        top.push((0..size).map(|_| next(spec.out_bits)).collect::<Result<Vec<_>>>()?);
    }
    if lines.any(|l| !l.is_empty()) {
        return Err(bad("trailing data"));
    }
    TornadoHash::from_tables(spec, seed, levels, top)
}
