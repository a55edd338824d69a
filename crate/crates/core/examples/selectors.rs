//! Selectors pick a hash-dependent subset of keys. This example builds a
//! bin selector, shows its JSON form and applies it to a hash function.
//!
//! `cargo run --example selectors`

use tornado_tab::selector::Selector;
use tornado_tab::{TornadoHash, TornadoSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = TornadoSpec::tornado(8, 2, 4, 4);
    // all keys hashing to bin 0 among the first 256 keys
    let sel = Selector::bin((0..256).collect(), 0, spec.out_bits)?;
    println!("expected selected count: {}", sel.mu());
    let small = Selector::bin(vec![3, 1, 2, 2], 5, spec.out_bits)?;
    println!("{}", serde_json::to_string(&small)?);

    for seed in 0..3 {
        let h = TornadoHash::build(spec, seed)?;
        let chosen = sel.select(&h)?;
        println!(
            "seed {seed}: {} keys selected, derived keys independent: {}",
            chosen.len(),
            sel.selected_derived_independent(&h)?
        );
    }

    let parsed: Selector = serde_json::from_str(r#"{"kind":"fixed-set","keys":["0x1","0x2"],"queries":[],"out_bits":8}"#)?;
    println!("parsed selector with {} candidates", parsed.candidates().len());
    Ok(())
}
