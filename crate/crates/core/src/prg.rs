//! Counter-mode table filling.
//!
//! Every logical table entry is an independent function of
//! `(seed, table_id, slot, field)`, so the draw order never matters and a
//! table dump can be reproduced by any implementation that copies these
//! constants.
//!
//! ```text
//! stream = mix64(mix64(seed ^ SEED_SALT) ^ (table_id << 32 | field))
//! value  = mix64(stream + (slot + 1) * GOLDEN_GAMMA)      (wrapping)
//! ```
//!
//! `mix64` is the splitmix64 finalizer.

/// Odd Weyl increment of splitmix64.
pub const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
/// Whitening constant XOR'd into the user seed (fractional digits of pi).
pub const SEED_SALT: u64 = 0x243f_6a88_85a3_08d3;
/// Salt for per-trial seed derivation.
pub const TRIAL_SALT: u64 = 0x1319_8a2e_0370_7344;

/// Field id of a level (derived character) entry.
pub const FIELD_LEVEL: u32 = 0;
/// Field id of a top simple-tabulation entry.
pub const FIELD_TOP: u32 = 1;

#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Table id of the level-`level` table at 1-based `position`.
#[inline]
pub const fn level_table_id(level: u32, position: u32) -> u32 {
    (level << 16) | position
}

/// Table id of the top table at 1-based `position`.
#[inline]
pub const fn top_table_id(position: u32) -> u32 {
    0x8000_0000 | position
}

/// A keyed stream over slots of one logical table.
#[derive(Debug, Clone, Copy)]
pub struct TableStream {
    base: u64,
}

impl TableStream {
    #[inline]
    pub fn new(seed: u64, table_id: u32, field: u32) -> Self {
        let tag = ((table_id as u64) << 32) | field as u64;
        Self {
            base: mix64(mix64(seed ^ SEED_SALT) ^ tag),
        }
    }

    #[inline]
    pub fn draw(&self, slot: u64) -> u64 {
        mix64(self.base.wrapping_add(slot.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }
}

#[inline]
pub fn draw(seed: u64, table_id: u32, slot: u64, field: u32) -> u64 {
    TableStream::new(seed, table_id, field).draw(slot)
}

/// Hash seed used by trial `t` of an experiment with `master` seed.
#[inline]
pub fn trial_seed(master: u64, t: u64) -> u64 {
    mix64(mix64(master ^ TRIAL_SALT).wrapping_add(t.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
