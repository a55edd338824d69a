//! Tail events of bin loads: long chains of keys sharing a bin, and a bin
//! receiving many more keys than expected.
//!
//! `cargo run --release --example tail_bounds`

use tornado_tab::experiments::{chaining_tail, chernoff_tail};
use tornado_tab::sample::{distinct_keys, rng, STREAM_KEYS};
use tornado_tab::selector::Selector;
use tornado_tab::TornadoSpec;

fn main() -> tornado_tab::Result<()> {
    let spec = TornadoSpec::tornado(8, 4, 4, 8);
    for r in chaining_tail(&spec, 256, &[3, 4, 6], 20_000, 9)? {
        println!(
            "k={}: P[bin 0 holds >= k keys] = {:.4} (bound {:.4})",
            r.params["k"], r.estimate, r.bound
        );
    }

    let spec = TornadoSpec::tornado(8, 2, 4, 4);
    let keys = distinct_keys(&mut rng(9, STREAM_KEYS), 1024, spec.key_mask(), &[])?;
    let sel = Selector::bin(keys, 0, spec.out_bits)?;
    let r = chernoff_tail(&sel, &spec, 0.5, 20_000, 9)?;
    println!(
        "mu={}: P[load >= 1.5 mu] = {:.2e} (bound {:.2e}) -> {:?}",
        sel.mu(),
        r.estimate,
        r.bound,
        r.verdict
    );
    Ok(())
}
