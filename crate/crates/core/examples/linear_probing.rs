//! A linear-probing table driven by tornado hashing, and a comparison of
//! probe-length distributions against a fully random hash function.
//!
//! `cargo run --release --example linear_probing`

use tornado_tab::linprobe::{probe_experiment, ProbeConfig, ProbeTable};
use tornado_tab::{TornadoHash, TornadoSpec};

fn main() -> tornado_tab::Result<()> {
    let h = TornadoHash::build(TornadoSpec::tornado(8, 2, 3, 10), 3)?;
    let mut table = ProbeTable::new(1024)?;
    for x in 0..700u64 {
        table.insert(x, h.eval(x))?;
    }
    let (found, probes) = table.lookup(123, h.eval(123));
    println!("lookup 123: found={found} after {probes} probes; {} of {} cells used", table.len(), table.capacity());

    let spec = TornadoSpec::tornado(16, 2, 4, 16);
    let cfg = ProbeConfig {
        n: 3 << 14,
        m: 1 << 16,
        queries: 1024,
        trials: 16,
        seed: 3,
        delta: None,
        alpha: 0.01,
    };
    let report = probe_experiment(&spec, &cfg)?;
    println!(
        "mean probes: tornado {:.2}, fully random {:.2}, Knuth {:.2}",
        report.tornado.mean(),
        report.baseline.mean(),
        report.knuth
    );
    println!(
        "tornado at n={} dominated by fully random at n*={}: {} (KS {:.4} vs tolerance {:.4})",
        report.n,
        report.n_star,
        report.dominance.holds,
        report.dominance.statistic,
        report.dominance.tolerance
    );
    Ok(())
}
