use thiserror::Error;

/// Default bound on the number of values any single enumeration may produce.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumeration of {needed} values exceeds cap {cap}")]
    CapExceeded { needed: u128, cap: u64 },
    #[error("space is not enumerable: {0}")]
    NotEnumerable(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("boundaries differ; lenses are not comparable")]
    NotComparable,
    #[error("cannot select from an empty space")]
    EmptySpace,
    #[error("unknown player: {0}")]
    UnknownPlayer(String),
    #[error("family members must share the same utility space")]
    RewardSpaceMismatch,
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("incomplete profile: {0}")]
    IncompleteProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
