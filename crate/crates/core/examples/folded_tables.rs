//! Fold the per-level tables into wide lookup tables and check that the
//! fast path agrees with the reference evaluation.
//!
//! `cargo run --release --example folded_tables`

use std::time::Instant;

use tornado_tab::{FoldedTables, TornadoHash, TornadoSpec};

fn main() -> tornado_tab::Result<()> {
    let h = TornadoHash::build(TornadoSpec::tornado(8, 4, 3, 32), 99)?;
    let folded = FoldedTables::new(&h)?;
    println!("{} table lookups per key", folded.lookups());

    let keys: Vec<u64> = (0..1u64 << 20).map(|i| i.wrapping_mul(0x9e37_79b9) & 0xffff_ffff).collect();
    for &x in &keys {
        assert_eq!(folded.eval(x), h.eval(x));
    }

    let start = Instant::now();
    let acc = keys.iter().fold(0u64, |acc, &x| acc ^ folded.eval(x));
    let ns = start.elapsed().as_nanos() as f64 / keys.len() as f64;
    println!("folded: {ns:.2} ns/key (checksum {acc:#x})");

    let start = Instant::now();
    let acc = keys.iter().fold(0u64, |acc, &x| acc ^ h.eval(x));
    let ns = start.elapsed().as_nanos() as f64 / keys.len() as f64;
    println!("reference: {ns:.2} ns/key (checksum {acc:#x})");
    Ok(())
}
