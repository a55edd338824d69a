//! Closed-form bounds and reference values.

use serde::Serialize;

use crate::error::{config, Result};

/// A bound value, tagged when its parameters fall outside the regime the
/// underlying theorem covers (alphabets smaller than 2^8).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub outside_regime: bool,
}

/// Smallest alphabet the dependence theorems are stated for.
pub const MIN_THEOREM_SIGMA: u64 = 256;

fn half_sigma_term(sigma_size: u64) -> f64 {
    (-(sigma_size as f64) / 2.0).exp2()
}

/// `7 μ³ (3/|Σ|)^{d+1} + 2^{-|Σ|/2}`.
pub fn dependence_bound(mu: f64, d: u32, sigma_size: u64) -> Result<Bound> {
    if mu.is_nan() || mu <= 0.0 {
        return config("dependence bound needs mu > 0");
    }
    if sigma_size < 2 {
        return config("alphabet must have at least two characters");
    }
    let ratio = 3.0 / sigma_size as f64;
    Ok(Bound {
        value: 7.0 * mu.powi(3) * ratio.powi(d as i32 + 1) + half_sigma_term(sigma_size),
        outside_regime: sigma_size < MIN_THEOREM_SIGMA,
    })
}

/// `14 μ³ (3/|Ψ|)² (3/|Σ|)^{d-1} + 2^{-|Σ|/2}`, for tornado-mix.
pub fn dependence_bound_mix(mu: f64, d: u32, sigma_size: u64, psi_size: u64) -> Result<Bound> {
    if mu.is_nan() || mu <= 0.0 {
        return config("dependence bound needs mu > 0");
    }
    if sigma_size < 2 || psi_size < sigma_size {
        return config("need |Psi| >= |Sigma| >= 2");
    }
    if d < 1 {
        return config("tornado-mix bound needs d >= 1");
    }
    let s = 3.0 / sigma_size as f64;
    let p = 3.0 / psi_size as f64;
    Ok(Bound {
        value: 14.0 * mu.powi(3) * p * p * s.powi(d as i32 - 1) + half_sigma_term(sigma_size),
        outside_regime: sigma_size < MIN_THEOREM_SIGMA,
    })
}

/// Chernoff upper tail `(e^δ / (1+δ)^{1+δ})^μ`, computed in log space.
pub fn chernoff_bound(mu: f64, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return config("delta must be positive");
    }
    if mu.is_nan() || mu < 0.0 {
        return config("mu must be non-negative");
    }
    Ok((mu * (delta - (1.0 + delta) * delta.ln_1p())).exp())
}

/// Probability bound that a fixed bin of a chaining table with as many bins
/// as keys receives at least `k` keys: `e^{k-1}/k^k + 7(3/|Σ|)^{d+1} + 2^{-|Σ|/2}`.
pub fn chaining_bound(k: u32, d: u32, sigma_size: u64) -> Result<Bound> {
    if k == 0 {
        return config("k must be at least 1");
    }
    let k = k as f64;
    let poisson = ((k - 1.0) - k * k.ln()).exp();
    let dep = dependence_bound(1.0, d, sigma_size)?;
    Ok(Bound {
        value: poisson + dep.value,
        outside_regime: dep.outside_regime,
    })
}

/// The reduced deviation used when `μ > |Σ|/2`:
/// `δ₀ = μ/(μ − |Q|) · (|Σ|/2 − |Q|)/(|Σ|/2) · δ`.
pub fn large_mu_delta0(mu: f64, queries: usize, sigma_size: u64, delta: f64) -> Result<f64> {
    let half = sigma_size as f64 / 2.0;
    let q = queries as f64;
    if mu <= half {
        return config("large-mu tail needs mu > |Sigma|/2");
    }
    if q >= half {
        return config("large-mu tail needs |Q| < |Sigma|/2");
    }
    if delta.is_nan() || delta <= 0.0 {
        return config("delta must be positive");
    }
    Ok(mu / (mu - q) * (half - q) / half * delta)
}

/// `4 (e^{δ₀}/(1+δ₀)^{1+δ₀})^{|Σ|/2} + 4 DependenceProb(|Σ|/2, d, Σ)`.
pub fn large_mu_bound(mu: f64, queries: usize, delta: f64, d: u32, sigma_size: u64) -> Result<Bound> {
    let delta0 = large_mu_delta0(mu, queries, sigma_size, delta)?;
    let half = sigma_size as f64 / 2.0;
    let dep = dependence_bound(half, d, sigma_size)?;
    Ok(Bound {
        value: 4.0 * chernoff_bound(half, delta0)? + 4.0 * dep.value,
        outside_regime: dep.outside_regime,
    })
}

/// Probability that a size-4 zero-set survives one round: `(3 − 2/|Σ|)/|Σ|`.
pub fn survival_one_round_prob(sigma_size: u64) -> f64 {
    let s = sigma_size as f64;
    (3.0 - 2.0 / s) / s
}

pub fn survival_d_rounds_prob(sigma_size: u64, d: u32) -> f64 {
    survival_one_round_prob(sigma_size).powi(d as i32)
}

/// Constant floor the hard instance's dependence rate is checked against:
/// `10^{-2} (3/|Σ|)^{d-2}`.
pub fn hard_instance_floor(sigma_size: u64, d: u32) -> f64 {
    1e-2 * (3.0 / sigma_size as f64).powi(d as i32 - 2)
}

/// Expected probe length of an insertion into a linear-probing table with
/// load `1 − ε`: `(1 + 1/ε²)/2`.
pub fn knuth_probe_length(eps: f64) -> f64 {
    (1.0 + 1.0 / (eps * eps)) / 2.0
}

/// `n* = (1 + 15 sqrt(ln(1/δ)/|Σ|)) n`, the key count of the dominating
/// fully-random experiment.
pub fn n_star(n: u64, delta: f64, sigma_size: u64) -> f64 {
    (1.0 + 15.0 * ((1.0 / delta).ln() / sigma_size as f64).sqrt()) * n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn dependence_values() {
        let b = dependence_bound(128.0, 4, 256).unwrap();
        assert!(!b.outside_regime);
        assert!(b.value < 1.0 / 300.0);
        // 7 * 2^21 * 3^5 / 2^40 + 2^-128
        let exact = 7.0 * 243.0 * (2f64).powi(21) / (2f64).powi(40);
        assert!(close(b.value, exact, 1e-15));
        assert!(close(b.value, 3.2445e-3, 1e-3));
        assert!(dependence_bound(8.0, 3, 16).unwrap().outside_regime);
        assert!(dependence_bound(0.0, 3, 256).is_err());
    }

    #[test]
    fn dependence_monotone() {
        let mut prev = f64::INFINITY;
        for d in 0..8 {
            let v = dependence_bound(100.0, d, 1024).unwrap().value;
            assert!(v < prev);
            if d > 0 {
                assert!(close(prev / v, 1024.0 / 3.0, 1e-12));
            }
            prev = v;
        }
        assert!(dependence_bound(10.0, 4, 256).unwrap().value < dependence_bound(11.0, 4, 256).unwrap().value);
        assert!(dependence_bound(10.0, 4, 512).unwrap().value < dependence_bound(10.0, 4, 256).unwrap().value);
    }

    #[test]
    fn mix_values() {
        let tail = (-128f64).exp2();
        let plain = dependence_bound(50.0, 3, 256).unwrap().value - tail;
        let mix = dependence_bound_mix(50.0, 3, 256, 256).unwrap().value - tail;
        assert!(close(mix, 2.0 * plain, 1e-12));
        let a = dependence_bound_mix(4096.0, 4, 256, 1 << 13).unwrap().value;
        let b = dependence_bound_mix(4096.0, 4, 256, 1 << 14).unwrap().value;
        assert!(a > 0.0 && a < 1.0);
        assert!(close(a - tail, 4.0 * (b - tail), 1e-12));
        assert!(dependence_bound_mix(1.0, 4, 256, 128).is_err());
    }

    #[test]
    fn chernoff_values() {
        assert!(close(chernoff_bound(8.0, 1.0).unwrap(), (std::f64::consts::E / 4.0).powi(8), 1e-12));
        assert!(close(chernoff_bound(8.0, 1.0).unwrap(), 0.0454, 1e-2));
        assert!(chernoff_bound(8.0, 1e-9).unwrap() > 0.999_999);
        assert!(chernoff_bound(8.0, 0.0).is_err());
        let b = chernoff_bound(64.0, 0.5).unwrap();
        assert!(close(b, (0.5f64.exp() / 1.5f64.powf(1.5)).powi(64), 1e-12));
        assert!(chernoff_bound(64.0, 0.6).unwrap() < b);
        assert!(chernoff_bound(65.0, 0.5).unwrap() < b);
    }

    #[test]
    fn chaining_values() {
        let b = chaining_bound(4, 4, 256).unwrap().value;
        let poisson = 3f64.exp() / 256.0;
        assert!(close(b, poisson + 7.0 * (3.0f64 / 256.0).powi(5) + (-128f64).exp2(), 1e-14));
        assert!(close(b - poisson, 1.547e-9, 1e-3));
        assert!(chaining_bound(1, 4, 256).unwrap().value >= 1.0);
    }

    #[test]
    fn large_mu_values() {
        let d0 = large_mu_delta0(512.0, 0, 256, 0.5).unwrap();
        assert!(close(d0, 0.5, 1e-15));
        let d1 = large_mu_delta0(512.0, 10, 256, 0.5).unwrap();
        assert!(d1 >= (1.0 - 10.0 / 128.0) * 0.5);
        let b = large_mu_bound(512.0, 0, 0.5, 4, 256).unwrap().value;
        assert!(b > 0.0 && b < 1.0);
        assert!(large_mu_delta0(100.0, 0, 256, 0.5).is_err());
        assert!(large_mu_delta0(512.0, 128, 256, 0.5).is_err());
    }

    #[test]
    fn survival_values() {
        assert_eq!(survival_one_round_prob(16), 0.1796875);
        assert_eq!(survival_one_round_prob(4), 0.625);
        assert!(close(survival_one_round_prob(256), 0.011688, 1e-4));
        assert!(close(survival_d_rounds_prob(16, 2), 0.032288, 1e-4));
        assert_eq!(survival_d_rounds_prob(16, 0), 1.0);
    }

    #[test]
    fn probing_references() {
        assert_eq!(knuth_probe_length(0.25), 8.5);
        assert!(close(n_star(1000, 1.0 / 256.0, 256), 1000.0 * (1.0 + 15.0 * (256f64.ln() / 256.0).sqrt()), 1e-15));
        assert_eq!(hard_instance_floor(16, 3), 1e-2 * 3.0 / 16.0);
    }
}
