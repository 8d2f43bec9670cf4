//! Exact scalars and sparse multivariate polynomials.

mod monomial;
mod parse;
mod poly;
mod scalar;

pub use monomial::Monomial;
pub(crate) use monomial::{grevlex_cmp, lex_cmp};
pub use poly::{poly_det, var_names, MultiPoly};
pub use scalar::{is_prime_u64, Field, Integers, PrimeField, PrimeFieldElement, Rationals, Ring, ScalarTag};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("incompatible polynomial rings: {0}")]
    RingMismatch(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}
