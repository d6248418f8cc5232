use std::fmt;

use thiserror::Error;

use crate::newton::GeometryError;
use crate::poly::{PolyError, Rational, UniPoly};

/// A step needed an irrational root; exact rational arithmetic stops here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicRootReport {
    pub context: String,
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: u32,
    pub factor: UniPoly,
}

impl fmt::Display for AlgebraicRootReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: root of {} in ({}, {}) with multiplicity {}",
            self.context, self.factor, self.lo, self.hi, self.multiplicity
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("algebraic root halt: {0}")]
    AlgebraicRoot(Box<AlgebraicRootReport>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series order {order} is insufficient: {detail}")]
    Truncation { order: usize, detail: String },
    #[error("step budget of {0} exhausted")]
    Budget(usize),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Internal(_) | Error::Budget(_) | Error::Geometry(GeometryError::RHeightMismatch { .. })
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
