//! Linear algebra over GF(2) on keys viewed as sets of (position, character)
//! pairs: ranks, zero subsets and independence of derived keys.
//!
//! `cargo run --example gf2_independence`

use std::sync::Arc;

use tornado_tab::gf2::{find_zero_subset, is_linearly_independent, rank, DerivedIndependence, GenKey, KeyLayout};
use tornado_tab::{TornadoHash, TornadoSpec};

fn main() -> tornado_tab::Result<()> {
    let layout = Arc::new(KeyLayout::uniform(2, 4));
    // a rectangle: every (position, character) pair occurs an even number of times
    let keys: Vec<GenKey> = [0x00u64, 0x01, 0x10, 0x11]
        .into_iter()
        .map(|x| GenKey::from_key(layout.clone(), x))
        .collect();
    println!("rank of the rectangle: {}", rank(&keys)?);
    println!("zero subset: {:?}", find_zero_subset(&keys)?);
    println!("first three independent: {}", is_linearly_independent(&keys[..3])?);

    // Plain keys {00, 01, 10, 11} are dependent, but after derivation they
    // usually are not.
    let spec = TornadoSpec::tornado(4, 2, 2, 8);
    let mut checker = DerivedIndependence::new(&spec);
    let mut independent = 0;
    let trials = 10_000;
    for seed in 0..trials {
        let h = TornadoHash::build(spec, seed)?;
        independent += checker.check(&h, &[0x00, 0x01, 0x10, 0x11]) as u32;
    }
    println!("derived keys independent in {independent}/{trials} functions");
    Ok(())
}
