use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {left} vs {right} bits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty key set")]
    EmptySet,

    #[error("key set is linearly independent, no zero subset exists")]
    Independent,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state space too large: {0} table fillings")]
    TooLarge(u128),

    #[error("linear-probing table is full (capacity {0})")]
    TableFull(usize),

    #[error("malformed table dump: {0}")]
    Dump(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
