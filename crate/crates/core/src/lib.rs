pub mod dump;
pub mod experiments;
pub mod baseline;
pub mod bench;
pub mod cli;
pub mod error;
pub mod folded;
pub mod gf2;
pub mod hash;
pub mod linprobe;
pub mod prg;
pub mod sample;
pub mod selector;
pub mod spec;

pub use error::{Error, Result};
pub use folded::FoldedTables;
pub use hash::{BitSplit, DerivedKey, TornadoHash};
pub use spec::{TornadoSpec, Variant};
