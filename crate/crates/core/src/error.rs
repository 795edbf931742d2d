use crate::perm::MoveKind;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid permutation: token `{0}` is not a positive integer")]
    BadToken(String),

    #[error("missing input: {0}")]
    MissingInput(&'static str),

    #[error("invalid permutation: duplicate value {0}")]
    DuplicateValue(u32),

    #[error("invalid permutation: value {value} out of range 1..={n}")]
    ValueOutOfRange { value: u32, n: usize },

    #[error("invalid block move: {0}")]
    InvalidMove(String),

    #[error("permutation is already sorted; no reducing move exists")]
    AlreadySorted,

    #[error("precondition violated in {0}")]
    Contract(&'static str),

    #[error(
        "n = {n} exceeds the cap {cap} for {kind} distance tables \
         (a table would need about {estimated_bytes} bytes); \
         the constructive sorter (`sort`) still gives an upper bound"
    )]
    ResourceLimit {
        n: usize,
        cap: usize,
        kind: MoveKind,
        estimated_bytes: u64,
    },

    #[error("malformed distance table: {0}")]
    BadTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
