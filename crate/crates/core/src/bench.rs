//! Hashing throughput of the folded tornado paths against a degree-2
//! polynomial over the Mersenne prime field `2^89 − 1`.

use std::hint::black_box;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::{config, Error, Result};
use crate::folded::FoldedTables;
use crate::hash::TornadoHash;
use crate::sample::{rng, STREAM_KEYS};
use crate::spec::{mask, TornadoSpec};

/// `2^89 − 1`.
pub const MERSENNE_89: u128 = (1 << 89) - 1;

/// Minimum number of timed repetitions; the median is reported.
pub const MIN_REPS: usize = 9;

#[inline]
fn fold89(v: u128) -> u128 {
    (v & MERSENNE_89) + (v >> 89)
}

/// `a · x mod p` for `a < 2^89`, by shift-add reduction.
#[inline]
fn mul_mod(a: u128, x: u64) -> u128 {
    let lo = (a as u64 as u128) * x as u128;
    let hi = (a >> 64) * x as u128; // < 2^89, weighs 2^64
    // hi · 2^64 = (hi >> 25) · 2^89 + (hi mod 2^25) · 2^64 ≡ (hi >> 25) + (hi mod 2^25) · 2^64
    let v = fold89(lo) + (hi >> 25) + ((hi & ((1 << 25) - 1)) << 64);
    fold89(v)
}

#[inline]
fn reduce(mut v: u128) -> u128 {
    v = fold89(v);
    if v >= MERSENNE_89 {
        v -= MERSENNE_89;
    }
    v
}

/// `h(x) = (a x² + b x + c) mod (2^89 − 1)`, truncated to the low
/// `out_bits` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Poly2Mersenne {
    a: u128,
    b: u128,
    c: u128,
    out_mask: u64,
}

impl Poly2Mersenne {
    /// Coefficients drawn uniformly from `[0, 2^89 − 1)`.
    pub fn new(seed: u64, out_bits: u32) -> Self {
        let mut r = rng(seed, 0);
        let mut draw = || loop {
            let v = r.gen::<u128>() & MERSENNE_89;
            if v < MERSENNE_89 {
                break v;
            }
        };
        let (a, b, c) = (draw(), draw(), draw());
        Self::with_coefficients(a, b, c, out_bits)
    }

    pub fn with_coefficients(a: u128, b: u128, c: u128, out_bits: u32) -> Self {
        Self {
            a: a % MERSENNE_89,
            b: b % MERSENNE_89,
            c: c % MERSENNE_89,
            out_mask: mask(out_bits),
        }
    }

    /// The full residue in `[0, p)`.
    #[inline]
    pub fn eval_full(&self, x: u64) -> u128 {
        let t = reduce(mul_mod(self.a, x) + self.b);
        reduce(mul_mod(t, x) + self.c)
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.eval_full(x) as u64 & self.out_mask
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Tornado, 32-bit keys, `c = 4`, `d = 3`, 32-bit output, folded.
    Tornado32Folded,
    /// Tornado-mix, 64-bit keys, `c = 8`, `d = 5`, 16-bit tail, 64-bit output.
    TornadoMix64Folded,
    /// Degree-2 polynomial mod `2^89 − 1` on 32-bit keys, 32-bit output.
    Poly2Mersenne,
    /// Simple tabulation, 32-bit keys, 32-bit output, folded.
    SimpleTabulation,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Tornado32Folded,
        Scheme::TornadoMix64Folded,
        Scheme::Poly2Mersenne,
        Scheme::SimpleTabulation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Tornado32Folded => "tornado32-folded",
            Scheme::TornadoMix64Folded => "tornado-mix64-folded",
            Scheme::Poly2Mersenne => "poly2-mersenne",
            Scheme::SimpleTabulation => "simple-tabulation",
        }
    }

    fn key_mask(self) -> u64 {
        match self {
            Scheme::TornadoMix64Folded => u64::MAX,
            _ => u32::MAX as u64,
        }
    }

    fn spec(self) -> Option<TornadoSpec> {
        match self {
            Scheme::Tornado32Folded => Some(TornadoSpec::tornado(8, 4, 3, 32)),
            Scheme::TornadoMix64Folded => Some(TornadoSpec::tornado_mix(8, 8, 5, 64, 16)),
            Scheme::SimpleTabulation => Some(TornadoSpec::simple_tabulation(8, 4, 32)),
            Scheme::Poly2Mersenne => None,
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub scheme: Scheme,
    pub n_keys: usize,
    pub reps: usize,
    /// Median wall time of one pass over the key buffer.
    pub total_ns: u64,
    pub ns_per_key: f64,
    /// XOR of all hash values of one pass.
    pub checksum: u64,
}

fn time_passes(keys: &[u64], reps: usize, f: impl Fn(u64) -> u64) -> (u64, u64) {
    let mut times = Vec::with_capacity(reps);
    let mut checksum = None;
    for _ in 0..reps {
        let start = Instant::now();
        let mut acc = 0u64;
        for &k in keys {
            acc ^= f(black_box(k));
        }
        let acc = black_box(acc);
        times.push(start.elapsed().as_nanos().max(1) as u64);
        assert_eq!(*checksum.get_or_insert(acc), acc, "hash pass is not deterministic");
    }
    times.sort_unstable();
    (times[times.len() / 2], checksum.unwrap_or(0))
}

/// Times `reps` passes (at least [`MIN_REPS`]) over `n_keys` pre-generated
/// random keys and reports the median.
pub fn throughput(scheme: Scheme, n_keys: usize, reps: usize, seed: u64) -> Result<BenchResult> {
    if n_keys == 0 {
        return config("benchmark needs at least one key");
    }
    if reps < MIN_REPS {
        return config(format!("benchmark needs at least {MIN_REPS} repetitions"));
    }
    let mut r = rng(seed, STREAM_KEYS);
    let keys: Vec<u64> = (0..n_keys).map(|_| r.gen::<u64>() & scheme.key_mask()).collect();
    let (total_ns, checksum) = match scheme.spec() {
        Some(spec) => {
            let folded = FoldedTables::new(&TornadoHash::build(spec, seed)?)?;
            time_passes(&keys, reps, |x| folded.eval(x))
        }
        None => {
            let p = Poly2Mersenne::new(seed, 32);
            time_passes(&keys, reps, |x| p.eval(x))
        }
    };
    Ok(BenchResult {
        scheme,
        n_keys,
        reps,
        total_ns,
        ns_per_key: total_ns as f64 / n_keys as f64,
        checksum,
    })
}

/// CSV with columns `scheme,n_keys,ns_per_key,checksum_hex`.
pub fn write_bench_csv<W: Write>(results: &[BenchResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    w.write_record(["scheme", "n_keys", "ns_per_key", "checksum_hex"]).map_err(err)?;
    for r in results {
        w.write_record([
            r.scheme.name().to_string(),
            r.n_keys.to_string(),
            format!("{:.3}", r.ns_per_key),
            format!("{:016x}", r.checksum),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))
}
