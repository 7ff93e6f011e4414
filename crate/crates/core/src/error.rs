use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("expected {expected} octal words, found {found}")]
    WordCount { expected: usize, found: usize },
    #[error("invalid octal digit in word {word:?}")]
    OctalDigit { word: String },
    #[error("word {word:?} has {digits} digits, at least {needed} are needed for memory {m}")]
    WordTooShort {
        word: String,
        digits: usize,
        needed: usize,
        m: usize,
    },
    #[error("word {word:?} sets a coefficient beyond degree {m}")]
    DegreeOverflow { word: String, m: usize },
    #[error("generator row {row} is identically zero")]
    ZeroRow { row: usize },
    #[error("invalid code dimensions k={k}, n={n}, m={m}: {reason}")]
    Dimensions {
        k: usize,
        n: usize,
        m: usize,
        reason: &'static str,
    },
    #[error("malformed code line {line:?}: {reason}")]
    Syntax { line: String, reason: String },
    #[error("prefix degree {p} exceeds memory {m}")]
    PrefixRange { p: usize, m: usize },
    #[error("half concatenation: {0}")]
    Concat(String),
    #[error("not a permutation of {0} elements")]
    Permutation(usize),
    #[error("profiles have different lengths ({0} vs {1})")]
    ProfileLength(usize, usize),
    #[error("encoder is catastrophic")]
    Catastrophic,
    #[error("state enumeration exceeded the limit of {0} steps")]
    StepLimit(usize),
    #[error("spectrum count overflowed the count type")]
    CountOverflow,
    #[error("{0} information bits are not divisible into blocks of {1}")]
    FrameLength(usize, usize),
    #[error("received sequence has {found} values, expected {expected}")]
    ObservationLength { expected: usize, found: usize },
    #[error("state space of 2^{0} states is too large for this operation")]
    StateSpace(usize),
    #[error("invalid search parameters: {0}")]
    Search(String),
    #[error("invalid simulation configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
