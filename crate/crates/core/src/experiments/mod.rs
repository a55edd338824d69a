//! Monte Carlo and exhaustive checks of the quantitative claims about
//! tornado hashing.
//!
//! Trial `t` of an experiment with master seed `s` uses the hash seed
//! [`trial_seed`]`(s, t)`. Trials run on the rayon pool and are combined
//! with integer sums, so results do not depend on the number of workers.

pub mod bounds;
mod dependence;
mod survival;
mod tails;
mod uniformity;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::prg::trial_seed;
use crate::spec::{TornadoSpec, Variant};

pub use bounds::Bound;
pub use dependence::{lower_bound_instance, measure_dependence};
pub use survival::{survival_d_rounds, survival_exhaustive, survival_one_round};
pub use tails::{chaining_tail, chernoff_tail, large_mu_tail};
pub use uniformity::{exact_uniformity_check, exact_uniformity_counts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    WithinBound,
    Violation,
    Informational,
}

impl Verdict {
    /// Upper-bound verdict: a violation needs the estimate to exceed the
    /// bound by more than four standard errors.
    pub fn judge(estimate: f64, stderr: f64, bound: f64, gating: bool) -> Self {
        if !gating {
            Verdict::Informational
        } else if estimate - 4.0 * stderr > bound {
            Verdict::Violation
        } else {
            Verdict::WithinBound
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub trials: u64,
    #[serde(with = "hex_seed")]
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    /// A report for `hits` successes out of `trials`, with binomial standard
    /// error.
    pub fn from_counts(name: &str, hits: u64, trials: u64, bound: f64, seed: u64, gating: bool) -> Self {
        let (estimate, stderr) = proportion(hits, trials);
        Self {
            name: name.to_string(),
            estimate,
            stderr,
            bound,
            trials,
            seed,
            params: BTreeMap::new(),
            verdict: Verdict::judge(estimate, stderr, bound, gating),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_spec(self, spec: &TornadoSpec) -> Self {
        self.with_param("spec", spec.to_string())
    }

    pub fn is_violation(&self) -> bool {
        self.verdict == Verdict::Violation
    }

    /// Whether the estimate is within `z` standard errors of `target`.
    pub fn agrees_with(&self, target: f64, z: f64) -> bool {
        (self.estimate - target).abs() <= z * self.stderr
    }
}

/// Estimate and binomial standard error `sqrt(p̂(1 − p̂)/trials)`.
pub fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// Writes reports as CSV with a header row. `params` becomes one column of
/// `key=value` pairs joined by `;`.
pub fn write_reports_csv<W: Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    w.write_record(["name", "estimate", "stderr", "bound", "trials", "seed", "params", "verdict"])
        .map_err(io)?;
    for r in reports {
        let params = r
            .params
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.name.clone(),
            format!("{:e}", r.estimate),
            format!("{:e}", r.stderr),
            format!("{:e}", r.bound),
            r.trials.to_string(),
            format!("{:#x}", r.seed),
            params,
            format!("{:?}", r.verdict),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))
}

mod hex_seed {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:#x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(s.trim_start_matches("0x"), 16).map_err(D::Error::custom)
    }
}

/// Whether a bound check on `spec` is a pass/fail gate: the theorems need
/// `|Σ| >= 2^8` and the twisted tornado variants.
pub(crate) fn theorem_applies(spec: &TornadoSpec) -> bool {
    spec.sigma_size() >= bounds::MIN_THEOREM_SIGMA && matches!(spec.variant, Variant::Tornado | Variant::TornadoMix)
}

/// Runs `trials` independent trials, each with its own hash seed and a
/// scratch state from `init`, accumulating `counters` integer tallies.
pub(crate) fn tally<S: Send, I, F>(trials: u64, master: u64, counters: usize, init: I, body: F) -> Vec<u64>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64, &mut [u64]) + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .fold(
            || (init(), vec![0u64; counters]),
            |(mut state, mut acc), t| {
                body(&mut state, trial_seed(master, t), &mut acc);
                (state, acc)
            },
        )
        .map(|(_, acc)| acc)
        .reduce(
            || vec![0u64; counters],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(Verdict::judge(0.5, 0.01, 0.4, true), Verdict::Violation);
        assert_eq!(Verdict::judge(0.5, 0.03, 0.4, true), Verdict::WithinBound);
        assert_eq!(Verdict::judge(0.5, 0.0, 0.4, false), Verdict::Informational);
    }

    #[test]
    fn proportion_stderr() {
        assert_eq!(proportion(0, 100), (0.0, 0.0));
        let (p, se) = proportion(25, 100);
        assert_eq!(p, 0.25);
        assert!((se - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tally_independent_of_pool_size() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| tally(5000, 7, 2, || (), |_, s, acc| {
                    acc[0] += s & 1;
                    acc[1] += s % 3;
                }))
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn report_serialization() {
        let r = ExperimentReport::from_counts("x", 3, 10, 0.5, 0x2a, true).with_param("k", 4);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("{\"name\":\"x\",\"estimate\":0.3,"));
        assert!(json.contains("\"seed\":\"0x2a\""));
        assert_eq!(serde_json::from_str::<ExperimentReport>(&json).unwrap(), r);
        let mut buf = Vec::new();
        write_reports_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "name,estimate,stderr,bound,trials,seed,params,verdict");
        assert!(lines.next().unwrap().starts_with("x,3e-1,"));
    }
}
