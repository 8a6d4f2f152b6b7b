use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Validation variants carry the witness that broke the axiom, so a caller
/// can print it without re-running the check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation is not commutative: table[{0}][{1}] != table[{1}][{0}]")]
    NotCommutative(usize, usize),
    #[error("operation is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} is not an identity (table[{0}][{1}] != {1})")]
    NoIdentity(usize, usize),
    #[error("modular component {component} has modulus {modulus}; need m >= 1")]
    BadModulus { component: usize, modulus: i64 },
    #[error("malformed semigroup: {0}")]
    Malformed(String),
    #[error("element belongs to a different semigroup")]
    SpecMismatch,
    #[error("element has {got} coordinates, semigroup needs {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for a semigroup of order {order}")]
    IndexOutOfRange { index: i64, order: usize },
    #[error("integer overflow while adding coordinates")]
    Overflow,
    #[error("set {0} must be nonempty")]
    EmptySet(String),
    #[error("expected an exponent vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("live-element budget exceeded at h = {0:?}")]
    BudgetExceeded(Vec<usize>),
    #[error("brute-force enumeration needs {needed} symbols, cap is {cap}")]
    EnumerationCapExceeded { needed: String, cap: u64 },
    #[error("box extent in direction {0} is too small")]
    BoxTooSmall(usize),
    #[error("interpolation grid does not fit inside the table box")]
    GridOutsideBox,
    #[error("gcd of the shifted summands is {0}, expected 1")]
    GcdNotOne(u64),
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("generator {0} is not a positive integer")]
    BadGenerator(i64),
    #[error("structure did not stabilize by diagonal step {0}")]
    NotStabilized(usize),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
