//! Compare hashing throughput across schemes.
//!
//! `cargo run --release --example throughput`

use tornado_tab::bench::{throughput, write_bench_csv, Scheme};

fn main() -> tornado_tab::Result<()> {
    let results = Scheme::ALL
        .into_iter()
        .map(|s| throughput(s, 1 << 20, 9, 1))
        .collect::<tornado_tab::Result<Vec<_>>>()?;
    write_bench_csv(&results, std::io::stdout().lock())
}
