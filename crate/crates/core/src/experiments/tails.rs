//! Upper tails of bin loads and selected-set sizes.

use crate::error::{config, precondition, Result};
use crate::gf2::DerivedIndependence;
use crate::hash::TornadoHash;
use crate::sample::{distinct_keys, rng, STREAM_KEYS};
use crate::selector::Selector;
use crate::spec::TornadoSpec;

use super::bounds::{chaining_bound, chernoff_bound, large_mu_bound, large_mu_delta0};
use super::dependence::check_selector;
use super::{tally, theorem_applies, ExperimentReport};

/// Hashes a fixed random set of `n` keys into `n` bins (`out_bits = log2 n`)
/// and estimates, for each `k`, the probability that bin 0 receives at
/// least `k` keys. One report per `k`, in the order given.
pub fn chaining_tail(spec: &TornadoSpec, n: u64, ks: &[u32], trials: u64, seed: u64) -> Result<Vec<ExperimentReport>> {
    spec.validate()?;
    if n == 0 || !n.is_power_of_two() {
        return config(format!("n = {n} is not a power of two"));
    }
    if spec.out_bits != n.trailing_zeros() {
        return config(format!(
            "{n} bins need out_bits = {}, spec has {}",
            n.trailing_zeros(),
            spec.out_bits
        ));
    }
    let bounds = ks
        .iter()
        .map(|&k| chaining_bound(k, spec.d, spec.sigma_size()))
        .collect::<Result<Vec<_>>>()?;
    let keys = distinct_keys(&mut rng(seed, STREAM_KEYS), n as usize, spec.key_mask(), &[])?;
    let spec = *spec;
    let counts = tally(
        trials,
        seed,
        ks.len(),
        || (),
        |_, hash_seed, acc| {
            let h = TornadoHash::build(spec, hash_seed).expect("validated spec");
            let load = keys.iter().filter(|&&x| h.eval(x) == 0).count() as u64;
            for (a, &k) in acc.iter_mut().zip(ks) {
                *a += (load >= k as u64) as u64;
            }
        },
    );
    Ok(ks
        .iter()
        .zip(bounds)
        .zip(counts)
        .map(|((&k, b), hits)| {
            let gating = theorem_applies(&spec) && !b.outside_regime;
            ExperimentReport::from_counts("chaining", hits, trials, b.value, seed, gating)
                .with_spec(&spec)
                .with_param("n", n)
                .with_param("k", k)
                .with_param("bin", 0)
        })
        .collect())
}

fn threshold(mu: f64, delta: f64) -> f64 {
    (1.0 + delta) * mu
}

/// Estimates `Pr[|X| >= (1+δ)μ and the selected derived keys are
/// independent]` against the Chernoff bound `(e^δ/(1+δ)^{1+δ})^μ`.
pub fn chernoff_tail(sel: &Selector, spec: &TornadoSpec, delta: f64, trials: u64, seed: u64) -> Result<ExperimentReport> {
    check_selector(sel, spec)?;
    let mu = sel.mu();
    let bound = chernoff_bound(mu, delta)?;
    if mu > spec.sigma_size() as f64 / 2.0 {
        return precondition(format!("mu = {mu} exceeds |Sigma|/2; use the large-mu tail"));
    }
    let t = threshold(mu, delta);
    let spec = *spec;
    let counts = tally(
        trials,
        seed,
        2,
        || DerivedIndependence::new(&spec),
        |scratch, hash_seed, acc| {
            let h = TornadoHash::build(spec, hash_seed).expect("validated spec");
            let selected = sel.select_by(|x| h.eval(x));
            if selected.len() as f64 >= t {
                acc[1] += 1;
                if scratch.check(&h, &selected) {
                    acc[0] += 1;
                }
            }
        },
    );
    let size_rate = if trials == 0 { 0.0 } else { counts[1] as f64 / trials as f64 };
    Ok(
        ExperimentReport::from_counts("chernoff", counts[0], trials, bound, seed, theorem_applies(&spec))
            .with_spec(&spec)
            .with_param("mu", mu)
            .with_param("delta", delta)
            .with_param("threshold", t)
            .with_param("size_only_rate", size_rate),
    )
}

/// Estimates `Pr[|X| >= (1+δ)μ]` for `μ > |Σ|/2` against
/// `4 (e^{δ₀}/(1+δ₀)^{1+δ₀})^{|Σ|/2} + 4 DependenceProb(|Σ|/2, d, Σ)`.
pub fn large_mu_tail(sel: &Selector, spec: &TornadoSpec, delta: f64, trials: u64, seed: u64) -> Result<ExperimentReport> {
    check_selector(sel, spec)?;
    let mu = sel.mu();
    let q = sel.queries().len();
    let delta0 = large_mu_delta0(mu, q, spec.sigma_size(), delta)
        .or_else(|e| precondition(e.to_string()))?;
    let bound = large_mu_bound(mu, q, delta, spec.d, spec.sigma_size())?;
    let t = threshold(mu, delta);
    let spec = *spec;
    let counts = tally(
        trials,
        seed,
        1,
        || (),
        |_, hash_seed, acc| {
            let h = TornadoHash::build(spec, hash_seed).expect("validated spec");
            if sel.select_by(|x| h.eval(x)).len() as f64 >= t {
                acc[0] += 1;
            }
        },
    );
    let gating = theorem_applies(&spec) && !bound.outside_regime;
    Ok(
        ExperimentReport::from_counts("large-mu-tail", counts[0], trials, bound.value, seed, gating)
            .with_spec(&spec)
            .with_param("mu", mu)
            .with_param("delta", delta)
            .with_param("delta0", delta0)
            .with_param("threshold", t),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Verdict;

    #[test]
    fn chaining_monotone_in_k() {
        let spec = TornadoSpec::tornado(8, 2, 2, 6);
        let ks = [1, 2, 3, 4, 6];
        let rs = chaining_tail(&spec, 64, &ks, 4000, 3).unwrap();
        assert_eq!(rs.len(), ks.len());
        assert!(rs.windows(2).all(|w| w[0].estimate >= w[1].estimate));
        // Pr[bin non-empty] = 1 - (1 - 1/64)^64 ≈ 0.636
        assert!((rs[0].estimate - 0.636).abs() < 0.04, "{}", rs[0].estimate);
        assert!(rs[0].bound >= 1.0);
        assert!(rs.iter().all(|r| r.verdict == Verdict::WithinBound));
    }

    #[test]
    fn chaining_rejects_bad_sizes() {
        let spec = TornadoSpec::tornado(8, 2, 2, 6);
        assert!(chaining_tail(&spec, 48, &[2], 10, 0).is_err());
        assert!(chaining_tail(&spec, 128, &[2], 10, 0).is_err());
        assert!(chaining_tail(&spec, 64, &[0], 10, 0).is_err());
    }

    #[test]
    fn chernoff_preconditions_and_sanity() {
        let spec = TornadoSpec::tornado(8, 2, 3, 4);
        let sel = Selector::bin((0..128).collect(), 0, 4).unwrap();
        assert!(chernoff_tail(&sel, &spec, 0.0, 10, 0).is_err());
        let r = chernoff_tail(&sel, &spec, 1.0, 3000, 1).unwrap();
        assert_eq!(r.params["mu"], 8.0);
        assert!(r.estimate <= r.params["size_only_rate"].as_f64().unwrap());
        assert!(r.estimate <= r.bound + 4.0 * r.stderr);
        let big = Selector::bin((0..4096).collect(), 0, 4).unwrap();
        assert!(chernoff_tail(&big, &spec, 1.0, 10, 0).is_err());
    }

    #[test]
    fn large_mu_behaviour() {
        let spec = TornadoSpec::tornado(8, 2, 2, 2);
        let sel = Selector::bin((0..1024).collect(), 1, 2).unwrap();
        assert_eq!(sel.mu(), 256.0);
        let quarter = large_mu_tail(&sel, &spec, 0.05, 500, 4).unwrap();
        let half = large_mu_tail(&sel, &spec, 0.1, 500, 4).unwrap();
        assert!(quarter.estimate >= half.estimate);
        assert!(half.bound > 0.0);
        // (1+δ)μ beyond the population can never be reached
        let never = large_mu_tail(&sel, &spec, 3.5, 200, 4).unwrap();
        assert_eq!(never.estimate, 0.0);
        let small = Selector::bin((0..64).collect(), 1, 2).unwrap();
        assert!(large_mu_tail(&small, &spec, 0.5, 10, 0).is_err());
    }
}
