use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value violated a structural precondition (empty input, wrong length,
    /// round index past the horizon, ...).
    #[error("structural error: {0}")]
    Structural(String),

    /// An example was evaluated against a class whose domain does not contain it.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// A brute-force computation was asked to run past its size guard.
    #[error("capability exceeded: {what} ({size} > {limit})")]
    Capability {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// A realizable-mode learner saw a label no surviving hypothesis agrees with.
    #[error("realizability violated at round {round}")]
    RealizabilityViolation { round: usize },

    /// A caller broke an interface contract, e.g. fed an inconsistent forecast.
    #[error("contract error: {0}")]
    Contract(String),

    /// Invalid or unconstructible configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
