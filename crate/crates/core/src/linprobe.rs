//! Linear-probing hash tables: insertion and lookup costs, run lengths, and
//! a tornado-versus-fully-random probe-length experiment.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::FullyRandom;
use crate::error::{config, Error, Result};
use crate::experiments::bounds::{knuth_probe_length, n_star};
use crate::experiments::{ExperimentReport, Verdict};
use crate::hash::TornadoHash;
use crate::prg::{mix64, trial_seed};
use crate::sample::{distinct_keys, rng, STREAM_BASELINE, STREAM_KEYS, STREAM_QUERIES};
use crate::spec::TornadoSpec;

/// Open-addressing table with `m` cells, `m` a power of two. No deletions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeTable {
    cells: Vec<Option<u64>>,
    count: usize,
}

impl ProbeTable {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || !m.is_power_of_two() {
            return config(format!("table size {m} is not a power of two"));
        }
        Ok(Self {
            cells: vec![None; m],
            count: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.cells.len()
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn cells(&self) -> &[Option<u64>] {
        &self.cells
    }

    #[inline]
    fn slot(&self, hash: u64) -> usize {
        hash as usize & (self.cells.len() - 1)
    }

    /// Places `key` in the first free cell at or after `hash` (cyclically)
    /// and returns the number of cells inspected.
    pub fn insert(&mut self, key: u64, hash: u64) -> Result<usize> {
        let m = self.cells.len();
        if self.count == m {
            return Err(Error::TableFull(m));
        }
        let mut i = self.slot(hash);
        let mut probes = 1;
        while self.cells[i].is_some() {
            i = (i + 1) & (m - 1);
            probes += 1;
        }
        self.cells[i] = Some(key);
        self.count += 1;
        Ok(probes)
    }

    /// Scans from `hash` until `key` or an empty cell is found. Returns
    /// whether the key is present and the number of cells inspected.
    pub fn lookup(&self, key: u64, hash: u64) -> (bool, usize) {
        let m = self.cells.len();
        let mut i = self.slot(hash);
        for probes in 1..=m {
            match self.cells[i] {
                None => return (false, probes),
                Some(k) if k == key => return (true, probes),
                Some(_) => i = (i + 1) & (m - 1),
            }
        }
        (false, m)
    }

    /// Cells an insertion at `hash` would inspect, without inserting.
    /// Equals `m` on a full table.
    pub fn insertion_probes(&self, hash: u64) -> usize {
        let m = self.cells.len();
        let mut i = self.slot(hash);
        let mut probes = 1;
        while self.cells[i].is_some() && probes < m {
            i = (i + 1) & (m - 1);
            probes += 1;
        }
        probes
    }

    /// Length of the maximal run of occupied cells containing cell `hash`,
    /// 0 when that cell is empty.
    pub fn run_length(&self, hash: u64) -> usize {
        let m = self.cells.len();
        let start = self.slot(hash);
        if self.cells[start].is_none() {
            return 0;
        }
        if self.count == m {
            return m;
        }
        let mut len = 1;
        let mut i = (start + 1) & (m - 1);
        while self.cells[i].is_some() {
            len += 1;
            i = (i + 1) & (m - 1);
        }
        let mut i = (start + m - 1) & (m - 1);
        while self.cells[i].is_some() {
            len += 1;
            i = (i + m - 1) & (m - 1);
        }
        len
    }
}

/// Sample distribution of a non-negative integer statistic, kept as a
/// histogram.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ProbeStats {
    pub histogram: BTreeMap<u64, u64>,
}

impl ProbeStats {
    pub fn record(&mut self, value: u64) {
        *self.histogram.entry(value).or_default() += 1;
    }

    pub fn merge(&mut self, other: &ProbeStats) {
        for (&v, &c) in &other.histogram {
            *self.histogram.entry(v).or_default() += c;
        }
    }

    pub fn count(&self) -> u64 {
        self.histogram.values().sum()
    }

    pub fn mean(&self) -> f64 {
        let n = self.count();
        if n == 0 {
            return 0.0;
        }
        self.histogram.iter().map(|(&v, &c)| v as f64 * c as f64).sum::<f64>() / n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.count();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self
            .histogram
            .iter()
            .map(|(&v, &c)| c as f64 * (v as f64 - mean).powi(2))
            .sum();
        ss / (n - 1) as f64
    }

    /// Empirical `Pr[X <= x]`.
    pub fn cdf(&self, x: u64) -> f64 {
        let n = self.count();
        if n == 0 {
            return 0.0;
        }
        self.histogram.range(..=x).map(|(_, &c)| c).sum::<u64>() as f64 / n as f64
    }

    pub fn max(&self) -> u64 {
        self.histogram.keys().next_back().copied().unwrap_or(0)
    }
}

/// One-sided comparison of two empirical CDFs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dominance {
    /// `max_x (F_dominating(x) − F_dominated(x))`; positive values mean the
    /// supposedly smaller variable is larger somewhere.
    pub statistic: f64,
    /// Two-sample DKW tolerance at confidence `1 − alpha`.
    pub tolerance: f64,
    pub alpha: f64,
    pub holds: bool,
}

/// Checks that `smaller` is stochastically dominated by `larger` up to the
/// two-sample DKW tolerance `sqrt(ln(2/α)/2n₁) + sqrt(ln(2/α)/2n₂)`.
pub fn dominance(smaller: &ProbeStats, larger: &ProbeStats, alpha: f64) -> Dominance {
    let eps = |n: u64| ((2.0 / alpha).ln() / (2.0 * n.max(1) as f64)).sqrt();
    let tolerance = eps(smaller.count()) + eps(larger.count());
    let points = smaller.histogram.keys().chain(larger.histogram.keys());
    let statistic = points
        .map(|&x| larger.cdf(x) - smaller.cdf(x))
        .fold(0.0f64, f64::max);
    Dominance {
        statistic,
        tolerance,
        alpha,
        holds: statistic <= tolerance,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Tornado,
    FullyRandom,
    /// Fully random hashing with `n*` keys.
    FullyRandomStar,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Tornado => "tornado",
            Source::FullyRandom => "fully-random",
            Source::FullyRandomStar => "fully-random-star",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub n: usize,
    pub m: usize,
    pub queries: usize,
    pub trials: u64,
    pub seed: u64,
    /// Failure probability in `n*`; defaults to `1/|Σ|`.
    pub delta: Option<f64>,
    /// DKW confidence parameter.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialHistogram {
    pub source: Source,
    pub seed: u64,
    pub probes: ProbeStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub spec: String,
    pub n: usize,
    pub m: usize,
    pub n_star: usize,
    pub delta: f64,
    pub knuth: f64,
    pub tornado: ProbeStats,
    pub tornado_runs: ProbeStats,
    pub baseline: ProbeStats,
    pub baseline_star: ProbeStats,
    pub dominance: Dominance,
    pub per_trial: Vec<TrialHistogram>,
}

impl ProbeReport {
    /// Summary as an experiment report: the estimate is the tornado mean
    /// probe length, the bound the Knuth reference; at `|Σ| >= 2^16` a
    /// failed dominance check is a violation.
    pub fn summary(&self, spec: &TornadoSpec, seed: u64, trials: u64) -> ExperimentReport {
        let n = self.tornado.count().max(1) as f64;
        let gating = spec.sigma_size() >= 1 << 16;
        let verdict = match (gating, self.dominance.holds) {
            (false, _) => Verdict::Informational,
            (true, true) => Verdict::WithinBound,
            (true, false) => Verdict::Violation,
        };
        let mut r = ExperimentReport::from_counts("probing", 0, trials, self.knuth, seed, false)
            .with_param("spec", self.spec.clone())
            .with_param("n", self.n as u64)
            .with_param("m", self.m as u64)
            .with_param("n_star", self.n_star as u64)
            .with_param("baseline_mean", self.baseline.mean())
            .with_param("baseline_star_mean", self.baseline_star.mean())
            .with_param("mean_run_length", self.tornado_runs.mean())
            .with_param("dominance_statistic", self.dominance.statistic)
            .with_param("dominance_tolerance", self.dominance.tolerance)
            .with_param("dominance_holds", self.dominance.holds);
        r.estimate = self.tornado.mean();
        r.stderr = (self.tornado.variance() / n).sqrt();
        r.verdict = verdict;
        r
    }

    /// Per-trial histograms as CSV: `source,seed,probe_length,count`.
    pub fn write_histogram_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        w.write_record(["source", "seed", "probe_length", "count"]).map_err(err)?;
        for t in &self.per_trial {
            for (len, count) in &t.probes.histogram {
                w.write_record([
                    t.source.name().to_string(),
                    format!("{:#x}", t.seed),
                    len.to_string(),
                    count.to_string(),
                ])
                .map_err(err)?;
            }
        }
        w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))
    }
}

/// Fills a table with `keys` under `hash` and records the insertion cost of
/// each query (which is not inserted) and the run length at its hash.
fn measure(m: usize, keys: &[u64], queries: &[u64], hash: impl Fn(u64) -> u64) -> (ProbeStats, ProbeStats) {
    let mut t = ProbeTable::new(m).expect("power of two");
    for &k in keys {
        t.insert(k, hash(k)).expect("n < m");
    }
    let mut probes = ProbeStats::default();
    let mut runs = ProbeStats::default();
    for &q in queries {
        let h = hash(q);
        probes.record(t.insertion_probes(h) as u64);
        runs.record(t.run_length(h) as u64);
    }
    (probes, runs)
}

/// Inserts `n` random keys into an `m`-cell table under tornado hashing and
/// under a fully-random stand-in, then measures the insertion cost of fresh
/// query keys drawn uniformly from outside the key set. A third table holds
/// `n*` keys under fully-random hashing for the dominance comparison.
pub fn probe_experiment(spec: &TornadoSpec, cfg: &ProbeConfig) -> Result<ProbeReport> {
    spec.validate()?;
    let m = cfg.m;
    if m == 0 || !m.is_power_of_two() {
        return config(format!("m = {m} is not a power of two"));
    }
    if spec.out_bits != m.trailing_zeros() {
        return config(format!("m = {m} needs out_bits = {}", m.trailing_zeros()));
    }
    if cfg.n as f64 > 0.8 * m as f64 {
        return config(format!("load {}/{} exceeds 4/5", cfg.n, m));
    }
    let delta = cfg.delta.unwrap_or(1.0 / spec.sigma_size() as f64);
    if !(delta > 0.0 && delta < 1.0) {
        return config("delta must lie in (0, 1)");
    }
    let n_star = n_star(cfg.n as u64, delta, spec.sigma_size()).ceil() as usize;
    if n_star >= m {
        return config(format!("n* = {n_star} does not fit in {m} cells; use a larger alphabet or lower load"));
    }
    let universe = spec.key_mask() as u128 + 1;
    if (n_star + cfg.queries) as u128 > universe {
        return config("key universe too small for the requested keys and queries");
    }

    let spec_v = *spec;
    let per_trial: Vec<[(ProbeStats, ProbeStats); 3]> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(cfg.seed, t);
            let keys = distinct_keys(&mut rng(s, STREAM_KEYS), cfg.n, spec_v.key_mask(), &[]).expect("checked");
            let queries =
                distinct_keys(&mut rng(s, STREAM_QUERIES), cfg.queries, spec_v.key_mask(), &keys).expect("checked");
            let mut exclude = keys.clone();
            exclude.extend(&queries);
            let extra = distinct_keys(&mut rng(s, STREAM_BASELINE), n_star - cfg.n, spec_v.key_mask(), &exclude)
                .expect("checked");
            let mut star_keys = keys.clone();
            star_keys.extend(extra);

            let h = TornadoHash::build(spec_v, s).expect("validated spec");
            let f = FullyRandom::new(mix64(s ^ STREAM_BASELINE), spec_v.out_bits);
            [
                measure(m, &keys, &queries, |x| h.eval(x)),
                measure(m, &keys, &queries, |x| f.eval(x)),
                measure(m, &star_keys, &queries, |x| f.eval(x)),
            ]
        })
        .collect();

    let mut agg: [ProbeStats; 3] = Default::default();
    let mut tornado_runs = ProbeStats::default();
    let mut hist = Vec::with_capacity(per_trial.len() * 3);
    let sources = [Source::Tornado, Source::FullyRandom, Source::FullyRandomStar];
    for (t, results) in per_trial.into_iter().enumerate() {
        let s = trial_seed(cfg.seed, t as u64);
        tornado_runs.merge(&results[0].1);
        for (i, (probes, _)) in results.into_iter().enumerate() {
            agg[i].merge(&probes);
            hist.push(TrialHistogram {
                source: sources[i],
                seed: s,
                probes,
            });
        }
    }
    let [tornado, baseline, baseline_star] = agg;
    let dominance = dominance(&tornado, &baseline_star, cfg.alpha);
    let eps = 1.0 - cfg.n as f64 / m as f64;
    Ok(ProbeReport {
        spec: spec.to_string(),
        n: cfg.n,
        m,
        n_star,
        delta,
        knuth: knuth_probe_length(eps),
        tornado,
        tornado_runs,
        baseline,
        baseline_star,
        dominance,
        per_trial: hist,
    })
}
