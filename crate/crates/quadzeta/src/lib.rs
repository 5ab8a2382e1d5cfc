//! Exact arithmetic for zeta functions of quadratic monogenic orders,
//! products of GL(2) orbital integrals over number fields of degree at most
//! two, and the associated Zagier-type L-functions with their functional
//! equations.
//!
//! Everything identity-shaped is carried by [`exact::ExpPoly`], a finite sum
//! of terms `c * b^(-s)` with rational `c` and positive rational `b`, so all
//! functional-equation checks are term-wise rational comparisons. Floating
//! point only enters in the numerical L-function evaluators of [`zagier`].

pub mod exact;
pub mod field;
pub mod global;
pub mod kloosterman;
pub mod oracle;
pub mod orderzeta;
pub mod verify;
pub mod zagier;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero input not allowed")]
    ZeroInput,
    #[error("delta is a square in the base field")]
    SquareDelta,
    #[error("delta is not a square modulo 4")]
    NotSquareMod4,
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0} is not a fundamental discriminant")]
    NonFundamental(i64),
    #[error("matrix is not regular over Q_p: {0}")]
    NotRegular(String),
    #[error("count did not stabilize below radius {0}")]
    Inconclusive(u32),
    #[error("internal identity violated: {0}")]
    IdentityViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
