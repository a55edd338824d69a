//! Write a hash function's tables as text and read them back.
//!
//! `cargo run --example table_dump`

use tornado_tab::dump::{dump_tables, parse_dump};
use tornado_tab::{TornadoHash, TornadoSpec};

fn main() -> tornado_tab::Result<()> {
    let h = TornadoHash::build(TornadoSpec::tornado(2, 2, 1, 6), 0x42)?;
    let text = dump_tables(&h);
    print!("{text}");

    let back = parse_dump(&text)?;
    assert_eq!(back, h);
    assert!((0..16).all(|x| back.eval(x) == h.eval(x)));
    println!("round trip ok");
    Ok(())
}
