use crate::rings::Ring;
use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation requires ring {expected}, got {found}")]
    WrongRing { expected: Ring, found: Ring },
    #[error("operands belong to different rings ({0} and {1})")]
    RingMismatch(Ring, Ring),
    #[error("polynomial is reducible over the quotient field")]
    ReduciblePolynomial,
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("discriminants differ by a non-square factor")]
    IncomparableDiscriminants,
    #[error("could not decide at {bits} bits of precision")]
    PrecisionExhausted { bits: u32 },
    #[error("ball contains zero")]
    ContainsZero,
    #[error("zero lies on the boundary circle")]
    ZeroOnBoundary,
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("element is not in the target set of the algorithm")]
    NotInTargetSet,
    #[error("a comparison on a cell boundary could not be decided")]
    Undecided,
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("enumeration limit exceeded ({needed} > {limit})")]
    EnumerationLimit { needed: u64, limit: u64 },
    #[error("factorization budget exceeded for {0}")]
    FactorizationBudget(String),
    #[error("denominators are not monotone (first drop at n = {0})")]
    MonotonicityRequired(usize),
    #[error("the point is not a zero of the form")]
    NotAZero,
    #[error("point lies in the quotient field")]
    InQuotientField,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
