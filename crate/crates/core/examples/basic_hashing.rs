//! Build a tornado hash function, evaluate it and inspect a derived key.
//!
//! `cargo run --example basic_hashing`

use tornado_tab::{BitSplit, TornadoHash, TornadoSpec};

fn main() -> tornado_tab::Result<()> {
    // 32-bit keys as four 8-bit characters, three derived characters, 32-bit output.
    let spec: TornadoSpec = "tornado:char_bits=8,c=4,d=3,out_bits=32".parse()?;
    let h = TornadoHash::build(spec, 0xC0FFEE)?;

    for x in [0u64, 1, 2, 0xdead_beef] {
        println!("h({x:#010x}) = {:#010x}", h.eval(x));
    }

    let derived = h.derive(0xdead_beef);
    println!("derived characters of 0xdeadbeef: {:02x?}", derived.chars());
    assert_eq!(h.eval_derived(derived.chars()), h.eval(0xdead_beef));

    // The same seed always rebuilds the same function.
    assert_eq!(TornadoHash::build(spec, 0xC0FFEE)?, h);

    // Split the output into 8 selection bits and 24 free bits.
    let split = BitSplit::new(8, 24, 32)?;
    println!(
        "select/free bits of h(42): {:#04x} / {:#08x}",
        h.select_bits(42, split),
        h.free_bits(42, split)
    );

    let mix = TornadoSpec::tornado_mix(8, 8, 5, 64, 16);
    let hm = TornadoHash::build(mix, 7)?;
    println!("{mix}: h(1) = {:#018x}", hm.eval(1));
    Ok(())
}
