//! Exact arithmetic substrate: prime fields, multivariate polynomials,
//! p-power rationals, Laurent-polynomial fractions, and linear solving
//! over F_p.
//!
//! Everything is immutable after construction and all operations are
//! pure functions, so values can be shared freely across threads.

pub mod fp;
pub mod laurent;
pub mod linsys;
pub mod poly;
pub mod prational;

pub use fp::FpScalar;
pub use laurent::{LaurentFrac, LaurentPoly};
pub use linsys::{LinearSystemFp, SolveOutcome};
pub use poly::{monomials_up_to, Monomial, MultiPoly};
pub use prational::PRational;

use thiserror::Error;

/// Errors from the arithmetic substrate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no leading term: the zero element has no Laurent expansion")]
    NoLeadingTerm,
    #[error("requested precision {prec} is below the valuation {valuation}")]
    PrecisionBelowValuation { prec: i64, valuation: i64 },
    #[error("parse error: {0}")]
    Parse(String),
}
