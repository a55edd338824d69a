//! Goodness-of-fit checks on hash outputs. Each test fails only when the
//! chi-square statistic exceeds its upper 1e-6 quantile.

use tornado_tab::baseline::FullyRandom;
use tornado_tab::{FoldedTables, TornadoHash, TornadoSpec};

/// Upper-tail quantile of chi-square with `k` degrees of freedom via the
/// Wilson–Hilferty cube approximation; `z` is the matching normal quantile.
fn chi_square_critical(k: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Normal quantile for an upper tail of 1e-6.
const Z_1E6: f64 = 4.753_424;

fn chi_square(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let expect = n as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum()
}

fn assert_uniform(counts: &[u64], what: &str) {
    let stat = chi_square(counts);
    let crit = chi_square_critical((counts.len() - 1) as f64, Z_1E6);
    assert!(stat <= crit, "{what}: chi-square {stat:.1} exceeds {crit:.1}");
}

#[test]
fn wilson_hilferty_matches_tabulated_quantiles() {
    // chi-square 0.999 quantiles: df 10 -> 29.588, df 100 -> 149.449
    for (df, exact) in [(10.0, 29.588), (100.0, 149.449)] {
        let approx = chi_square_critical(df, 3.090_232);
        assert!((approx / exact - 1.0).abs() < 0.01, "df {df}: {approx}");
    }
}

#[test]
fn single_key_output_is_uniform_over_seeds() {
    let spec = TornadoSpec::tornado(8, 2, 3, 8);
    for key in [0u64, 1, 0x0100, 0xfffe] {
        let mut counts = vec![0u64; 256];
        for seed in 0..40_000u64 {
            counts[TornadoHash::build(spec, seed).unwrap().eval(key) as usize] += 1;
        }
        assert_uniform(&counts, &format!("key {key:#x}"));
    }
}

#[test]
fn key_pairs_are_pairwise_uniform() {
    let spec = TornadoSpec::tornado(4, 2, 2, 3);
    let pairs = [(0x00u64, 0x01u64), (0x00, 0x10), (0x11, 0x22), (0x3a, 0x3b)];
    for (x, y) in pairs {
        let mut counts = vec![0u64; 64];
        for seed in 0..30_000u64 {
            let h = TornadoHash::build(spec, seed).unwrap();
            counts[((h.eval(x) << 3) | h.eval(y)) as usize] += 1;
        }
        assert_uniform(&counts, &format!("pair ({x:#x}, {y:#x})"));
    }
}

#[test]
fn folded_outputs_fill_buckets_evenly() {
    let h = TornadoHash::build(TornadoSpec::tornado(8, 4, 3, 32), 0x5eed).unwrap();
    let folded = FoldedTables::new(&h).unwrap();
    let mut counts = vec![0u64; 1024];
    // consecutive keys are the structured case for tabulation
    for x in 0..1u64 << 20 {
        counts[(folded.eval(x) >> 22) as usize] += 1;
    }
    assert_uniform(&counts, "top 10 bits over consecutive keys");
}

#[test]
fn mix_variant_low_bits_are_uniform() {
    let h = TornadoHash::build(TornadoSpec::tornado_mix(8, 8, 5, 64, 16), 3).unwrap();
    let mut counts = vec![0u64; 4096];
    for i in 0..1u64 << 20 {
        let x = i.wrapping_mul(0x0101_0101_0101_0101);
        counts[(h.eval(x) & 0xfff) as usize] += 1;
    }
    assert_uniform(&counts, "low 12 bits of repeated-byte keys");
}

#[test]
fn baseline_is_uniform() {
    let f = FullyRandom::new(9, 10);
    let mut counts = vec![0u64; 1024];
    for x in 0..1u64 << 18 {
        counts[f.eval(x) as usize] += 1;
    }
    assert_uniform(&counts, "fully random baseline");
}
