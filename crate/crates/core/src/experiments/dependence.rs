use crate::error::{config, precondition, Result};
use crate::gf2::DerivedIndependence;
use crate::hash::TornadoHash;
use crate::selector::{hard_instance_keys, Selector};
use crate::spec::{TornadoSpec, Variant};

use super::bounds::{dependence_bound, dependence_bound_mix, hard_instance_floor, Bound};
use super::{tally, theorem_applies, ExperimentReport};

pub(crate) fn check_selector(sel: &Selector, spec: &TornadoSpec) -> Result<()> {
    spec.validate()?;
    if sel.out_bits() != spec.out_bits {
        return config(format!(
            "selector reads {}-bit hashes but the spec produces {}",
            sel.out_bits(),
            spec.out_bits
        ));
    }
    let key_mask = spec.key_mask();
    if sel.candidates().iter().chain(sel.queries()).any(|&x| x > key_mask) {
        return config("selector contains keys outside the key universe");
    }
    Ok(())
}

fn bound_for(spec: &TornadoSpec, mu: f64) -> Result<Bound> {
    match spec.variant {
        Variant::TornadoMix => dependence_bound_mix(mu, spec.d, spec.sigma_size(), spec.psi_size()),
        _ => dependence_bound(mu, spec.d, spec.sigma_size()),
    }
}

/// Fraction of trial hash functions for which the derived keys of the
/// selected set are linearly dependent.
pub fn measure_dependence(sel: &Selector, spec: &TornadoSpec, trials: u64, seed: u64) -> Result<ExperimentReport> {
    check_selector(sel, spec)?;
    let mu = sel.mu();
    let limit = match spec.variant {
        Variant::TornadoMix => spec.psi_size() as f64 / 2.0,
        _ => spec.sigma_size() as f64 / 2.0,
    };
    if mu > limit {
        return precondition(format!("mu = {mu} exceeds the admissible {limit}"));
    }
    let bound = bound_for(spec, mu)?;
    let spec = *spec;
    let counts = tally(
        trials,
        seed,
        2,
        || DerivedIndependence::new(&spec),
        |scratch, hash_seed, acc| {
            let h = TornadoHash::build(spec, hash_seed).expect("validated spec");
            let selected = sel.select_by(|x| h.eval(x));
            acc[1] += selected.len() as u64;
            if !scratch.check(&h, &selected) {
                acc[0] += 1;
            }
        },
    );
    let gating = theorem_applies(&spec) && !bound.outside_regime;
    Ok(
        ExperimentReport::from_counts("independence", counts[0], trials, bound.value, seed, gating)
            .with_spec(&spec)
            .with_param("mu", mu)
            .with_param("population", sel.population() as u64)
            .with_param("mean_selected", if trials == 0 { 0.0 } else { counts[1] as f64 / trials as f64 })
            .with_param("outside_regime", bound.outside_regime),
    )
}

/// The lower-bound construction for `c = 2`: keys `{0, 1} × Σ`, selected when
/// the two leftmost hash bits are zero, so `μ = |Σ|/2`. Reports the
/// dependence rate with the constant floor `10^{-2} (3/|Σ|)^{d-2}` attached.
pub fn lower_bound_instance(spec: &TornadoSpec, trials: u64, seed: u64) -> Result<ExperimentReport> {
    if spec.c != 2 {
        return config("the hard instance is defined for c = 2");
    }
    if spec.out_bits < 2 {
        return config("the hard instance selects on two hash bits");
    }
    if spec.d < 2 {
        return config("the hard instance needs d >= 2");
    }
    let sel = Selector::top_bits_zero(hard_instance_keys(spec.char_bits), 2, spec.out_bits)?;
    let floor = hard_instance_floor(spec.sigma_size(), spec.d);
    let mut report = measure_dependence(&sel, spec, trials, seed)?;
    report.name = "lowerbound".to_string();
    // a lower-bound observation, never an upper-bound gate
    report.verdict = super::Verdict::Informational;
    let above = report.estimate > 0.0 && report.estimate >= floor;
    Ok(report.with_param("floor", floor).with_param("above_floor", above))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Verdict;

    #[test]
    fn zero_set_without_derived_characters_is_always_dependent() {
        // {00, 01, 10, 11} over Σ = [8], c = 2: a zero-set
        let spec = TornadoSpec::simple_tabulation(3, 2, 4);
        let sel = Selector::fixed_set(vec![0o00, 0o01, 0o10, 0o11], 4).unwrap();
        let r = measure_dependence(&sel, &spec, 200, 1).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.verdict, Verdict::Informational);
    }

    #[test]
    fn independent_keys_never_dependent() {
        // keys differing only in one position are always independent
        let spec = TornadoSpec::tornado(4, 2, 2, 8);
        let sel = Selector::fixed_set((0..8).collect(), 8).unwrap();
        let r = measure_dependence(&sel, &spec, 500, 3).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn preconditions() {
        let spec = TornadoSpec::tornado(4, 2, 2, 8);
        let sel = Selector::fixed_set((0..9).collect(), 8).unwrap();
        assert!(matches!(
            measure_dependence(&sel, &spec, 10, 0),
            Err(crate::error::Error::Precondition(_))
        ));
        let wrong_bits = Selector::fixed_set((0..4).collect(), 9).unwrap();
        assert!(measure_dependence(&wrong_bits, &spec, 10, 0).is_err());
        let outside = Selector::fixed_set(vec![1 << 8], 8).unwrap();
        assert!(measure_dependence(&outside, &spec, 10, 0).is_err());
        assert!(lower_bound_instance(&TornadoSpec::tornado(4, 3, 3, 8), 10, 0).is_err());
    }

    #[test]
    fn reproducible_and_gating() {
        let spec = TornadoSpec::tornado(8, 2, 2, 16);
        let mut rng = crate::sample::rng(5, crate::sample::STREAM_KEYS);
        let keys = crate::sample::distinct_keys(&mut rng, 64, spec.key_mask(), &[]).unwrap();
        let sel = Selector::fixed_set(keys, 16).unwrap();
        let a = measure_dependence(&sel, &spec, 300, 11).unwrap();
        let b = measure_dependence(&sel, &spec, 300, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.verdict, Verdict::Informational);
        assert_eq!(a.params["mean_selected"], 64.0);
    }

    #[test]
    fn hard_instance_shows_dependence() {
        let spec = TornadoSpec::tornado(4, 2, 2, 8);
        let r = lower_bound_instance(&spec, 20_000, 1).unwrap();
        assert!(r.estimate > 0.0);
        assert_eq!(r.params["mu"], 8.0);
        assert_eq!(r.verdict, Verdict::Informational);
    }
}
