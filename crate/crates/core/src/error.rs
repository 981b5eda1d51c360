use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not an odd prime")]
    InvalidModulus(u64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("coefficient {coefficient} needs a modulus larger than {p}")]
    CoefficientTooLarge { coefficient: i64, p: u32 },

    #[error("modulus {p} too small: this operation needs p > {needed}")]
    ModulusTooSmall { p: u32, needed: u32 },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("vectors are not linearly independent")]
    DependentBasis,

    #[error("operation requires a linear subspace, got an affine one")]
    AffineSubspace,

    #[error("invalid linear form system: {0}")]
    InvalidSystem(String),

    #[error("system has {m} forms; exact partition search is capped at {cap}")]
    TooManyForms { m: usize, cap: usize },

    #[error("system is not square-independent")]
    NotSquareIndependent,

    #[error("forms are dependent at every testable power up to k = {max_k}")]
    NoIndependentPower { max_k: usize },

    #[error("system has CS-complexity {actual}, but the check needs complexity at most {required}")]
    ComplexityTooHigh { actual: String, required: usize },

    #[error("function takes a value of modulus {value} > 1 where a bounded function is required")]
    Unbounded { value: f64 },

    #[error("function is not real-valued")]
    NotReal,

    #[error("job needs {required} scalar operations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
