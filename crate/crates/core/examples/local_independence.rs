//! Estimate how often a selected key set fails to be derived-independent,
//! next to the theoretical bound, and run the matching hard instance.
//!
//! `cargo run --release --example local_independence`

use tornado_tab::experiments::{lower_bound_instance, measure_dependence};
use tornado_tab::sample::{distinct_keys, rng, STREAM_KEYS};
use tornado_tab::selector::Selector;
use tornado_tab::TornadoSpec;

fn main() -> tornado_tab::Result<()> {
    let spec = TornadoSpec::tornado(8, 2, 4, 32);
    let keys = distinct_keys(&mut rng(1, STREAM_KEYS), 128, spec.key_mask(), &[])?;
    let sel = Selector::fixed_set(keys, spec.out_bits)?;
    let report = measure_dependence(&sel, &spec, 20_000, 1)?;
    println!(
        "dependence: {:.2e} ± {:.1e} (bound {:.2e}) -> {:?}",
        report.estimate, report.stderr, report.bound, report.verdict
    );

    let hard = lower_bound_instance(&TornadoSpec::tornado(4, 2, 3, 8), 200_000, 1)?;
    println!(
        "hard instance: {:.2e} ± {:.1e}, floor {}",
        hard.estimate, hard.stderr, hard.params["floor"]
    );
    Ok(())
}
