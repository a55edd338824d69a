//! Survival of a four-key zero-set through rounds of derived characters,
//! with simple derived keys (no twist).

use crate::error::{config, Error, Result};
use crate::hash::TornadoHash;
use crate::spec::{mask, TornadoSpec};

use super::bounds::{survival_d_rounds_prob, survival_one_round_prob};
use super::{tally, ExperimentReport, Verdict};

/// Whether four characters pair up, i.e. every value occurs an even number
/// of times.
fn pairs_up(mut v: [u32; 4]) -> bool {
    v.sort_unstable();
    v[0] == v[1] && v[2] == v[3]
}

fn split(spec: &TornadoSpec, x: u64) -> Vec<u32> {
    (0..spec.c).map(|i| ((x >> (i * spec.char_bits)) & mask(spec.char_bits)) as u32).collect()
}

fn check_zero_set(spec: &TornadoSpec, ys: &[u64]) -> Result<[u64; 4]> {
    spec.validate()?;
    if spec.c < 2 {
        return config("zero-sets of distinct keys need c >= 2");
    }
    let ys: [u64; 4] = ys
        .try_into()
        .map_err(|_| Error::Precondition("survival needs exactly four keys".into()))?;
    if ys.iter().any(|&y| y > spec.key_mask()) {
        return config("zero-set key outside the key universe");
    }
    let mut sorted = ys;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("zero-set keys must be distinct".into()));
    }
    let chars: Vec<Vec<u32>> = ys.iter().map(|&y| split(spec, y)).collect();
    for (p, first) in chars[0].iter().enumerate() {
        if !pairs_up([*first, chars[1][p], chars[2][p], chars[3][p]]) {
            return Err(Error::Precondition("keys do not form a zero-set".into()));
        }
    }
    Ok(ys)
}

fn run(spec: &TornadoSpec, ys: &[u64], rounds: u32, trials: u64, seed: u64) -> Result<(u64, TornadoSpec)> {
    let ys = check_zero_set(spec, ys)?;
    let simple = TornadoSpec::simple_tornado(spec.char_bits, spec.c, rounds, spec.out_bits);
    simple.validate()?;
    let c = spec.c as usize;
    let n = simple.derived_len();
    let counts = tally(
        trials,
        seed,
        1,
        || vec![[0u32; 4]; n],
        |cols, hash_seed, acc| {
            let h = TornadoHash::build(simple, hash_seed).expect("validated spec");
            let mut buf = vec![0u32; n];
            for (k, &y) in ys.iter().enumerate() {
                h.derive_into(y, &mut buf);
                for (p, &ch) in buf.iter().enumerate() {
                    cols[p][k] = ch;
                }
            }
            if cols[c..].iter().all(|&col| pairs_up(col)) {
                acc[0] += 1;
            }
        },
    );
    Ok((counts[0], simple))
}

fn survival_report(name: &str, spec: TornadoSpec, hits: u64, trials: u64, target: f64, seed: u64) -> ExperimentReport {
    let mut r = ExperimentReport::from_counts(name, hits, trials, target, seed, false);
    r.verdict = Verdict::Informational;
    let agrees = r.agrees_with(target, 3.0);
    r.with_spec(&spec).with_param("within_3sigma", agrees)
}

/// Fraction of trials in which the first derived character of the four keys
/// `ys` pairs up; `bound` is the exact value `(3 − 2/|Σ|)/|Σ|`.
pub fn survival_one_round(spec: &TornadoSpec, ys: &[u64], trials: u64, seed: u64) -> Result<ExperimentReport> {
    let (hits, simple) = run(spec, ys, 1, trials, seed)?;
    let target = survival_one_round_prob(spec.sigma_size());
    Ok(survival_report("survival-one-round", simple, hits, trials, target, seed))
}

/// As [`survival_one_round`] over all `spec.d` derived characters, against
/// `((3 − 2/|Σ|)/|Σ|)^d`.
pub fn survival_d_rounds(spec: &TornadoSpec, ys: &[u64], trials: u64, seed: u64) -> Result<ExperimentReport> {
    let (hits, simple) = run(spec, ys, spec.d, trials, seed)?;
    let target = survival_d_rounds_prob(spec.sigma_size(), spec.d);
    Ok(survival_report("survival-d-rounds", simple, hits, trials, target, seed).with_param("rounds", spec.d))
}

/// Enumerates every filling of the first round's `c` tables and returns
/// `(surviving fillings, total fillings)`. Limited to `2^24` fillings.
pub fn survival_exhaustive(spec: &TornadoSpec, ys: &[u64]) -> Result<(u64, u64)> {
    let ys = check_zero_set(spec, ys)?;
    let c = spec.c as usize;
    let sigma = spec.sigma_size() as usize;
    let cb = spec.char_bits;
    let total_bits = c as u128 * sigma as u128 * cb as u128;
    if total_bits > 24 {
        return Err(Error::TooLarge(1u128 << total_bits.min(127)));
    }
    let chars: Vec<Vec<u32>> = ys.iter().map(|&y| split(spec, y)).collect();
    // bit offset of table entry (p, ch) inside the filling index
    let offsets: Vec<[u32; 4]> = (0..c)
        .map(|p| std::array::from_fn(|k| ((p * sigma + chars[k][p] as usize) as u32) * cb))
        .collect();
    let m = mask(cb);
    let total = 1u64 << total_bits;
    let survived = (0..total)
        .filter(|&f| {
            let mut v = [0u32; 4];
            for off in &offsets {
                for k in 0..4 {
                    v[k] ^= ((f >> off[k]) & m) as u32;
                }
            }
            pairs_up(v)
        })
        .count() as u64;
    Ok((survived, total))
}
