use std::fmt;

use num_traits::{One, Zero};

use super::Rational;

/// `x = T y`, i.e. `x1 = a·y1 + b·y2`, `x2 = c·y1 + d·y2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearMap {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl LinearMap {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        LinearMap { a, b, c, d }
    }

    pub fn identity() -> Self {
        LinearMap::new(Rational::one(), Rational::zero(), Rational::zero(), Rational::one())
    }

    pub fn swap() -> Self {
        LinearMap::new(Rational::zero(), Rational::one(), Rational::one(), Rational::zero())
    }

    /// `x2 = y2 + s·y1`.
    pub fn shear_x2(s: Rational) -> Self {
        LinearMap::new(Rational::one(), Rational::zero(), s, Rational::one())
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_identity(&self) -> bool {
        *self == LinearMap::identity()
    }

    /// Matrix product `self · rhs`, so that `φ∘(self·rhs) = (φ∘self)∘rhs`.
    pub fn compose(&self, rhs: &LinearMap) -> LinearMap {
        LinearMap::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn inverse(&self) -> Option<LinearMap> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let inv = det.recip();
        Some(LinearMap::new(
            &self.d * &inv,
            -&self.b * &inv,
            -&self.c * &inv,
            &self.a * &inv,
        ))
    }
}

impl fmt::Display for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
