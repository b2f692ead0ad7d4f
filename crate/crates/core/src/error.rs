use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} is outside the supported range")]
    FieldTooLarge(u64),
    #[error("modulus has degree {got}, expected {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("modulus must be monic with coefficients below the characteristic")]
    BadModulus,
    #[error("polynomial {0:?} is reducible")]
    Reducible(Vec<u32>),
    #[error("cannot parse field description {0:?}")]
    FieldSyntax(String),
    #[error("element {0} does not belong to a field of order {1}")]
    InvalidElement(u32, u32),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("generator has rank {rank} but {rows} rows")]
    RankDeficient { rows: usize, rank: usize },
    #[error("enumeration of {size} codewords exceeds the budget of {budget}; use sampling")]
    EnumerationBudget { size: u128, budget: u128 },
    #[error("positions {0:?} are not an information set")]
    NotInformationSet(Vec<usize>),
    #[error("decoding failed: {0}")]
    DecodeFailure(String),
    #[error("code is not a Reed-Solomon evaluation code")]
    NotReedSolomon,
    #[error("code carries no evaluation structure")]
    NoEvaluation,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("insufficient results: {present} present, {required} required")]
    InsufficientResults { present: usize, required: usize },
    #[error("syntax error: {0}")]
    Syntax(String),
}
