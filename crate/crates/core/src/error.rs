use thiserror::Error;

/// Errors produced by the enumeration engines and their front-ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length {n} exceeds the engine cap of {max}", max = crate::perm::MAX_N)]
    LengthCap { n: usize },

    #[error("not a permutation of 1..={n}: {reason}")]
    InvalidPermutation { n: usize, reason: String },

    #[error("rank {rank} out of range for length {n} (must be < {n}!)")]
    RankOutOfRange { rank: u64, n: usize },

    #[error("word contains duplicate entries")]
    InvalidWord,

    #[error("replacement set is empty")]
    EmptyPatternSet,

    #[error("replacement set mixes pattern lengths {a} and {b}")]
    MixedPatternLengths { a: usize, b: usize },

    #[error("pattern length {c} must be at least 2")]
    PatternTooShort { c: usize },

    #[error("pattern length {c} exceeds host length {n}")]
    PatternLongerThanHost { c: usize, n: usize },

    #[error("stale occurrence: letters at {positions:?} no longer form the pattern {expected}")]
    StaleOccurrence {
        positions: Vec<usize>,
        expected: String,
    },

    #[error("permutations have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },

    #[error(
        "projected memory {required} bytes for {what} exceeds the configured budget of {budget} bytes"
    )]
    ResourceBudget {
        what: String,
        required: u64,
        budget: u64,
    },

    #[error("prefix mismatch at position {position}: expected {expected}, found {found}")]
    PrefixMismatch {
        position: usize,
        expected: u8,
        found: u8,
    },

    #[error("{formula} is only defined for n >= {min}, got n = {n}")]
    FormulaRange {
        formula: &'static str,
        min: usize,
        n: usize,
    },

    #[error("{formula} numerator is not divisible at n = {n}")]
    FormulaNotInteger { formula: &'static str, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
