//! How often a zero set of four keys keeps all its derived characters paired
//! up through the derivation rounds.
//!
//! `cargo run --release --example survival`

use tornado_tab::experiments::{survival_d_rounds, survival_exhaustive, survival_one_round};
use tornado_tab::experiments::bounds::{survival_d_rounds_prob, survival_one_round_prob};
use tornado_tab::TornadoSpec;

fn main() -> tornado_tab::Result<()> {
    // the rectangle {1,2} x {0,3} in two 4-bit characters
    let ys = [0x01u64, 0x02, 0x31, 0x32];
    let spec = TornadoSpec::tornado(4, 2, 2, 8);

    let one = survival_one_round(&spec, &ys, 200_000, 5)?;
    println!("one round: {:.4} (formula {:.4})", one.estimate, survival_one_round_prob(16));
    let all = survival_d_rounds(&spec, &ys, 200_000, 5)?;
    println!("{} rounds: {:.4} (formula {:.4})", spec.d, all.estimate, survival_d_rounds_prob(16, spec.d));

    let small = TornadoSpec::tornado(2, 2, 1, 4);
    let (survived, total) = survival_exhaustive(&small, &[0x01, 0x02, 0x0d, 0x0e])?;
    println!(
        "exhaustive over every table filling at |Σ|=4: {survived}/{total} = {:.4} (formula {:.4})",
        survived as f64 / total as f64,
        survival_one_round_prob(4)
    );
    Ok(())
}
