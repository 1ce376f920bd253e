use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{dividend} is not divisible by {divisor}")]
    InexactDivision { dividend: String, divisor: String },
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("variable set mismatch")]
    VariableMismatch,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("denominator of {0} vanishes modulo {1}")]
    DenominatorVanishesModP(String, u64),
    #[error("content of an empty list")]
    EmptyContent,
    #[error("zero polynomial has no integer normalization")]
    ZeroPolynomial,
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("coefficient {0} is not an element of {1}")]
    CoefficientNotInRing(String, String),
    #[error("operation requires a field, got {0}")]
    NotAField(String),
    #[error("affine part is not invertible")]
    NonInvertibleAffinePart,
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeExceeded { degree: u32, bound: u32 },
    #[error("affine part is not the identity")]
    NonIdentityAffinePart,
    #[error("enumeration of {size} points exceeds the cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("search budget of {0} steps exceeded")]
    BudgetExceeded(u64),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("monomial order mismatch: basis uses {basis}, requested {requested}")]
    OrderMismatch { basis: String, requested: String },
    #[error("cache error: {0}")]
    Cache(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
