//! Parameterization of a tabulation hash family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};

/// Largest alphabet of the two wide tail characters of tornado-mix.
pub const MAX_PSI_BITS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Plain simple tabulation, no derived characters.
    SimpleTabulation,
    /// Derived characters without the twist of the last input character.
    SimpleTornado,
    /// Twisted tornado tabulation.
    Tornado,
    /// Tornado whose last two derived characters come from a wider alphabet
    /// and both depend only on the first `c + d - 2` characters.
    TornadoMix,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::SimpleTabulation => "simple-tabulation",
            Variant::SimpleTornado => "simple-tornado",
            Variant::Tornado => "tornado",
            Variant::TornadoMix => "tornado-mix",
        }
    }

    pub fn is_twisted(self) -> bool {
        matches!(self, Variant::Tornado | Variant::TornadoMix)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple-tabulation" | "simple" => Ok(Variant::SimpleTabulation),
            "simple-tornado" => Ok(Variant::SimpleTornado),
            "tornado" => Ok(Variant::Tornado),
            "tornado-mix" | "mix" => Ok(Variant::TornadoMix),
            other => config(format!("unknown variant `{other}`")),
        }
    }
}

/// Full parameterization of a hash family.
///
/// Keys are words of `c * char_bits` bits; character `x_1` is the least
/// significant `char_bits` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TornadoSpec {
    pub char_bits: u32,
    pub c: u32,
    pub d: u32,
    pub out_bits: u32,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_bits: Option<u32>,
}

impl TornadoSpec {
    pub fn tornado(char_bits: u32, c: u32, d: u32, out_bits: u32) -> Self {
        Self {
            char_bits,
            c,
            d,
            out_bits,
            variant: Variant::Tornado,
            psi_bits: None,
        }
    }

    pub fn simple_tornado(char_bits: u32, c: u32, d: u32, out_bits: u32) -> Self {
        Self {
            variant: Variant::SimpleTornado,
            ..Self::tornado(char_bits, c, d, out_bits)
        }
    }

    pub fn simple_tabulation(char_bits: u32, c: u32, out_bits: u32) -> Self {
        Self {
            variant: Variant::SimpleTabulation,
            ..Self::tornado(char_bits, c, 0, out_bits)
        }
    }

    pub fn tornado_mix(char_bits: u32, c: u32, d: u32, out_bits: u32, psi_bits: u32) -> Self {
        Self {
            variant: Variant::TornadoMix,
            psi_bits: Some(psi_bits),
            ..Self::tornado(char_bits, c, d, out_bits)
        }
    }

    /// Same parameters, different variant. `psi_bits` is dropped unless the
    /// new variant is tornado-mix.
    pub fn with_variant(self, variant: Variant) -> Self {
        Self {
            variant,
            psi_bits: if variant == Variant::TornadoMix {
                self.psi_bits
            } else {
                None
            },
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=16).contains(&self.char_bits) {
            return config(format!("char_bits must be in 1..=16, got {}", self.char_bits));
        }
        if self.c == 0 {
            return config("c must be at least 1");
        }
        if self.char_bits * self.c > 64 {
            return config(format!(
                "key of {} characters of {} bits does not fit a 64-bit word",
                self.c, self.char_bits
            ));
        }
        if !(1..=64).contains(&self.out_bits) {
            return config(format!("out_bits must be in 1..=64, got {}", self.out_bits));
        }
        if self.d > 64 {
            return config(format!("d = {} is unreasonably large (max 64)", self.d));
        }
        match self.variant {
            Variant::SimpleTabulation if self.d != 0 => {
                return config("simple tabulation has no derived characters (d must be 0)")
            }
            Variant::TornadoMix => {
                if self.d < 2 {
                    return config("tornado-mix needs d >= 2");
                }
                match self.psi_bits {
                    None => return config("tornado-mix needs psi_bits"),
                    Some(p) if p < self.char_bits || p > MAX_PSI_BITS => {
                        return config(format!(
                            "psi_bits must be in {}..={MAX_PSI_BITS}, got {p}",
                            self.char_bits
                        ))
                    }
                    _ => {}
                }
            }
            _ if self.psi_bits.is_some() => {
                return config("psi_bits is only meaningful for tornado-mix")
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of characters of a derived key, `c + d`.
    pub fn derived_len(&self) -> usize {
        (self.c + self.d) as usize
    }

    pub fn sigma_size(&self) -> u64 {
        1u64 << self.char_bits
    }

    pub fn psi_size(&self) -> u64 {
        1u64 << self.psi_bits.unwrap_or(self.char_bits)
    }

    pub fn key_bits(&self) -> u32 {
        self.c * self.char_bits
    }

    /// Number of keys in the universe `Σ^c`, saturating at `u64::MAX` for
    /// 64-bit keys.
    pub fn universe_size(&self) -> u64 {
        if self.key_bits() >= 64 {
            u64::MAX
        } else {
            1u64 << self.key_bits()
        }
    }

    pub fn key_mask(&self) -> u64 {
        mask(self.key_bits())
    }

    pub fn out_mask(&self) -> u64 {
        mask(self.out_bits)
    }

    /// Bit width of derived character `position` (1-based).
    pub fn position_bits(&self, position: usize) -> u32 {
        let n = self.derived_len();
        if self.variant == Variant::TornadoMix && position + 2 > n {
            self.psi_bits.unwrap_or(self.char_bits)
        } else {
            self.char_bits
        }
    }

    /// Bit width of the values produced by level `level`.
    pub fn level_value_bits(&self, level: u32) -> u32 {
        if self.variant == Variant::TornadoMix && level + 1 >= self.d {
            self.psi_bits.unwrap_or(self.char_bits)
        } else {
            self.char_bits
        }
    }

    /// Number of derived-key positions that level `level` reads.
    ///
    /// Level 0 twists `x_c` from `x_1..x_{c-1}`; level `i >= 1` computes
    /// `x̃_{c+i}` from all preceding characters, except that the two
    /// tornado-mix tail levels both read only `x̃_1..x̃_{c+d-2}`.
    pub fn level_inputs(&self, level: u32) -> usize {
        let natural = (self.c + level - 1) as usize;
        if self.variant == Variant::TornadoMix && level == self.d {
            natural - 1
        } else {
            natural
        }
    }

    /// Whether level `level` has stored tables.
    pub fn level_present(&self, level: u32) -> bool {
        if level > self.d {
            return false;
        }
        if level == 0 {
            return self.variant.is_twisted() && self.c >= 2;
        }
        true
    }

    /// Number of logical lookup tables of the top simple tabulation, one per
    /// derived-key position.
    pub fn lookup_table_count(&self) -> usize {
        self.derived_len()
    }
}

pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// `<variant>:char_bits=8,c=4,d=4,out_bits=24[,psi_bits=16]`
impl fmt::Display for TornadoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:char_bits={},c={},d={},out_bits={}",
            self.variant, self.char_bits, self.c, self.d, self.out_bits
        )?;
        if let Some(p) = self.psi_bits {
            write!(f, ",psi_bits={p}")?;
        }
        Ok(())
    }
}

impl FromStr for TornadoSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (variant, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("spec string `{s}` lacks `variant:`")))?;
        let variant: Variant = variant.parse()?;
        let mut spec = TornadoSpec {
            char_bits: 0,
            c: 0,
            d: 0,
            out_bits: 0,
            variant,
            psi_bits: None,
        };
        for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("bad spec field `{kv}`")))?;
            let v: u32 = v
                .parse()
                .map_err(|_| Error::Config(format!("bad value in `{kv}`")))?;
            match k {
                "char_bits" => spec.char_bits = v,
                "c" => spec.c = v,
                "d" => spec.d = v,
                "out_bits" => spec.out_bits = v,
                "psi_bits" => spec.psi_bits = Some(v),
                _ => return config(format!("unknown spec field `{k}`")),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        assert!(TornadoSpec::tornado(0, 2, 1, 8).validate().is_err());
        assert!(TornadoSpec::tornado(17, 2, 1, 8).validate().is_err());
        assert!(TornadoSpec::tornado(16, 5, 1, 8).validate().is_err());
        assert!(TornadoSpec::tornado(8, 2, 1, 0).validate().is_err());
        assert!(TornadoSpec::tornado(8, 2, 1, 65).validate().is_err());
        assert!(TornadoSpec::tornado_mix(8, 4, 1, 32, 16).validate().is_err());
        assert!(TornadoSpec::tornado_mix(8, 4, 3, 32, 4).validate().is_err());
        let mut st = TornadoSpec::simple_tabulation(8, 4, 32);
        st.d = 1;
        assert!(st.validate().is_err());
        let mut t = TornadoSpec::tornado(8, 4, 2, 32);
        t.psi_bits = Some(16);
        assert!(t.validate().is_err());
    }

    #[test]
    fn accepts_paper_profiles() {
        TornadoSpec::tornado(8, 4, 4, 24).validate().unwrap();
        TornadoSpec::tornado(8, 4, 3, 32).validate().unwrap();
        TornadoSpec::tornado_mix(8, 8, 5, 64, 16).validate().unwrap();
        TornadoSpec::simple_tabulation(8, 8, 64).validate().unwrap();
    }

    #[test]
    fn spec_string_round_trip() {
        for spec in [
            TornadoSpec::tornado(8, 4, 4, 24),
            TornadoSpec::tornado_mix(8, 8, 5, 64, 16),
            TornadoSpec::simple_tabulation(4, 2, 8),
            TornadoSpec::simple_tornado(2, 3, 2, 5),
        ] {
            let s = spec.to_string();
            assert!(!s.contains(' '));
            assert_eq!(s.parse::<TornadoSpec>().unwrap(), spec);
        }
        assert_eq!(
            TornadoSpec::tornado(8, 4, 4, 24).to_string(),
            "tornado:char_bits=8,c=4,d=4,out_bits=24"
        );
    }

    #[test]
    fn mix_level_shapes() {
        let s = TornadoSpec::tornado_mix(8, 8, 5, 64, 16);
        assert_eq!(s.level_inputs(0), 7);
        assert_eq!(s.level_inputs(1), 8);
        assert_eq!(s.level_inputs(4), 11);
        assert_eq!(s.level_inputs(5), 11);
        assert_eq!(s.level_value_bits(3), 8);
        assert_eq!(s.level_value_bits(4), 16);
        assert_eq!(s.level_value_bits(5), 16);
        assert_eq!(s.position_bits(11), 8);
        assert_eq!(s.position_bits(12), 16);
        assert_eq!(s.position_bits(13), 16);
    }

    #[test]
    fn twist_presence() {
        assert!(!TornadoSpec::tornado(8, 1, 2, 8).level_present(0));
        assert!(TornadoSpec::tornado(8, 2, 2, 8).level_present(0));
        assert!(!TornadoSpec::simple_tornado(8, 2, 2, 8).level_present(0));
        assert!(!TornadoSpec::simple_tabulation(8, 2, 8).level_present(0));
    }
}
