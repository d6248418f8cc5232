//! Exact arithmetic substrate: rationals, univariate polynomials with real-root
//! isolation, and bivariate Puiseux polynomials.

mod linear;
mod puiseux;
mod roots;
mod unipoly;

pub use linear::LinearMap;
pub use puiseux::{Axis, Exponent, PuiseuxPoly};
pub use roots::{squarefree_real_roots, HalfPlane, RootLocation, RootRecord};
pub use unipoly::UniPoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

/// Arbitrary-precision fraction kept in lowest terms.
pub type Rational = BigRational;

/// Builds `n/d`. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Lossy conversion for numerics and plotting.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("shear function must not depend on x2")]
    ShearDependsOnX2,
    #[error("shear function has a nonzero constant term")]
    ShearConstantTerm,
    #[error("operation requires integer exponents, found ramification {0}")]
    FractionalExponents(BigInt),
    #[error("linear map is singular")]
    SingularMap,
    #[error("fractional powers are only evaluated for x1 > 0 (got x1 = {0})")]
    FractionalDomain(String),
    #[error("divisor is not monic in x2")]
    NotMonic,
    #[error("zero polynomial")]
    Zero,
}
