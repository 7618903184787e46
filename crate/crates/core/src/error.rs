use alloc::string::String;

/// Errors raised by the norm oracles, greedy operators, estimators and checks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Basis indices start at 1.
    #[error("index 0 is not a basis index")]
    ZeroIndex,
    #[error("index {index} exceeds the dimension cap {cap}")]
    IndexOutOfRange { index: usize, cap: usize },
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },
    #[error("duplicate index {index}")]
    DuplicateIndex { index: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Input(String),
    /// An enumeration would exceed its cap; `count` is the (saturating) size
    /// of the full family.
    #[error("{what}: {count} items exceed the enumeration cap {cap}")]
    Budget {
        what: String,
        count: u128,
        cap: usize,
    },
    #[error("empty search budget: {0}")]
    EmptyBudget(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
