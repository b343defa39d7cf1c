use thiserror::Error;

/// Errors raised by the field, poset, matrix and counting layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field of order {p}^{e} exceeds the size cap {cap}")]
    FieldTooLarge { p: u64, e: u32, cap: u64 },
    #[error("no primitive {k}-th root of unity in GF({q}): {k} does not divide {q}-1")]
    NoSuchRoot { k: u32, q: u32 },
    #[error("parts sum to {got}, expected {expected}")]
    PartsMismatch { expected: u64, got: u64 },
    #[error("star arms must have positive length")]
    EmptyArm,
    #[error("invalid poset shape: {0}")]
    InvalidShape(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cover relations contain a cycle through {0}")]
    Cycle(String),
    #[error("duplicate element label {0}")]
    DuplicateLabel(String),
    #[error("operands live on different posets")]
    MixedPoset,
    #[error("operands live over different fields")]
    MixedField,
    #[error("position ({0}, {1}) is outside the incidence support")]
    OutsideSupport(usize, usize),
    #[error("matrix must be at least 3x3, got {0}x{0}")]
    TooSmall(usize),
    #[error("characteristic guard failed: {0}")]
    CharGuardFailed(String),
    #[error("diagonal value with code {code} at position {index} is not a potent scalar")]
    NotPotentScalar { index: usize, code: u32 },
    #[error("diagonal has {got} values, poset has {expected} elements")]
    DiagonalLength { expected: usize, got: usize },
    #[error("element code {code} is outside GF({q})")]
    CodeOutOfRange { code: u64, q: u32 },
    #[error("no value supplied for free slot ({0}, {1})")]
    MissingFreeValue(usize, usize),
    #[error("value supplied for ({0}, {1}), which is not a free slot")]
    ExtraFreeValue(usize, usize),
    #[error("pair ({0}, {1}) is not a forced slot")]
    NotForced(usize, usize),
    #[error("forced entry has zero diagonal; only the fixed-point solve covers this case")]
    ZeroDiagonalCase,
    #[error("search space of {states} states exceeds the cap {cap}")]
    SearchSpaceTooLarge { states: String, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
