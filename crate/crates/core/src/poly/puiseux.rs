use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{int, LinearMap, PolyError, Rational, UniPoly};

/// Exponent pair `(e1, e2)` with `e1 ∈ (1/q)ℤ≥0`. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent {
    pub e1: Rational,
    pub e2: u32,
}

impl Exponent {
    pub fn new(e1: Rational, e2: u32) -> Self {
        assert!(!e1.is_negative(), "negative x1 exponent");
        Exponent { e1, e2 }
    }

    pub fn int(e1: u32, e2: u32) -> Self {
        Exponent::new(int(e1 as i64), e2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// Finite sum of `c · x1^e1 · x2^e2` with rational `c ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PuiseuxPoly {
    terms: BTreeMap<Exponent, Rational>,
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        PuiseuxPoly::default()
    }

    pub fn one() -> Self {
        PuiseuxPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        PuiseuxPoly::monomial(c, Rational::zero(), 0)
    }

    pub fn monomial(c: Rational, e1: Rational, e2: u32) -> Self {
        let mut p = PuiseuxPoly::zero();
        p.add_term(Exponent::new(e1, e2), c);
        p
    }

    pub fn x1() -> Self {
        PuiseuxPoly::monomial(Rational::one(), Rational::one(), 0)
    }

    pub fn x2() -> Self {
        PuiseuxPoly::monomial(Rational::one(), Rational::zero(), 1)
    }

    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(terms: I) -> Self {
        let mut p = PuiseuxPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Builds from integer triples `(c, e1, e2)`.
    pub fn from_int_terms(terms: &[(i64, u32, u32)]) -> Self {
        PuiseuxPoly::from_terms(
            terms
                .iter()
                .map(|&(c, e1, e2)| (Exponent::int(e1, e2), int(c))),
        )
    }

    /// Univariate polynomial in `x1` from `(coefficient, exponent)` pairs.
    pub fn from_x1_terms<'a, I: IntoIterator<Item = (&'a Rational, &'a Rational)>>(terms: I) -> Self {
        PuiseuxPoly::from_terms(
            terms
                .into_iter()
                .map(|(c, e)| (Exponent::new(e.clone(), 0), c.clone())),
        )
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical `(e1, e2)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Least common denominator of all `e1`.
    pub fn ramification(&self) -> BigInt {
        self.terms
            .keys()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.e1.denom()))
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.e1.is_integer())
    }

    fn require_polynomial(&self) -> Result<(), PolyError> {
        if self.is_polynomial() {
            Ok(())
        } else {
            Err(PolyError::FractionalExponents(self.ramification()))
        }
    }

    pub fn depends_on_x2(&self) -> bool {
        self.terms.keys().any(|e| e.e2 > 0)
    }

    pub fn degree_x2(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.e2).max()
    }

    pub fn min_e2(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.e2).min()
    }

    pub fn min_e1(&self) -> Option<Rational> {
        self.terms.keys().map(|e| e.e1.clone()).min()
    }

    /// Largest `e1 + e2` over the support.
    pub fn total_degree(&self) -> Option<Rational> {
        self.terms.keys().map(|e| &e.e1 + int(e.e2 as i64)).max()
    }

    /// Lowest term of a univariate polynomial in `x1` as `(coefficient, exponent)`.
    pub fn leading_x1_term(&self) -> Option<(Rational, Rational)> {
        self.terms
            .iter()
            .next()
            .map(|(e, c)| (c.clone(), e.e1.clone()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return PuiseuxPoly::zero();
        }
        PuiseuxPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Multiplies by `x1^a x2^b`.
    pub fn shift(&self, a: &Rational, b: u32) -> Self {
        PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (Exponent::new(&e.e1 + a, e.e2 + b), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = PuiseuxPoly::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Coefficients `C_j(x1)` of `φ = Σ_j C_j(x1) x2^j`, index `j`.
    pub fn x2_coefficients(&self) -> Vec<PuiseuxPoly> {
        let n = self.degree_x2().map_or(0, |d| d as usize + 1);
        let mut out = vec![PuiseuxPoly::zero(); n];
        for (e, c) in &self.terms {
            out[e.e2 as usize].add_term(Exponent::new(e.e1.clone(), 0), c.clone());
        }
        out
    }

    fn from_x2_coefficients(coeffs: &[PuiseuxPoly]) -> Self {
        let mut out = PuiseuxPoly::zero();
        for (j, cj) in coeffs.iter().enumerate() {
            for (e, c) in &cj.terms {
                out.add_term(Exponent::new(e.e1.clone(), e.e2 + j as u32), c.clone());
            }
        }
        out
    }

    /// `φ^f(y) = φ(y1, y2 + f(y1))`.
    pub fn shear(&self, f: &PuiseuxPoly) -> Result<Self, PolyError> {
        if f.depends_on_x2() {
            return Err(PolyError::ShearDependsOnX2);
        }
        if !f.coeff(&Exponent::int(0, 0)).is_zero() {
            return Err(PolyError::ShearConstantTerm);
        }
        let lin = &PuiseuxPoly::x2() + f;
        let mut acc = PuiseuxPoly::zero();
        for cj in self.x2_coefficients().iter().rev() {
            acc = &(&acc * &lin) + cj;
        }
        Ok(acc)
    }

    /// `(φ∘T)(y) = φ(T y)` for integer-exponent `φ`.
    pub fn linear_substitute(&self, t: &LinearMap) -> Result<Self, PolyError> {
        self.require_polynomial()?;
        if t.det().is_zero() {
            return Err(PolyError::SingularMap);
        }
        let l1 = PuiseuxPoly::from_terms([
            (Exponent::int(1, 0), t.a.clone()),
            (Exponent::int(0, 1), t.b.clone()),
        ]);
        let l2 = PuiseuxPoly::from_terms([
            (Exponent::int(1, 0), t.c.clone()),
            (Exponent::int(0, 1), t.d.clone()),
        ]);
        let max1 = self
            .terms
            .keys()
            .map(|e| e.e1.to_integer().to_usize().expect("exponent fits"))
            .max()
            .unwrap_or(0);
        let max2 = self.degree_x2().unwrap_or(0) as usize;
        let p1 = powers(&l1, max1);
        let p2 = powers(&l2, max2);
        let mut out = PuiseuxPoly::zero();
        for (e, c) in &self.terms {
            let i = e.e1.to_integer().to_usize().expect("exponent fits");
            let term = (&p1[i] * &p2[e.e2 as usize]).scale(c);
            out = &out + &term;
        }
        Ok(out)
    }

    /// `x1 -> -x1`, integer exponents only.
    pub fn negate_x1(&self) -> Result<Self, PolyError> {
        self.require_polynomial()?;
        Ok(PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let odd = e.e1.to_integer().is_odd();
                    (e.clone(), if odd { -c } else { c.clone() })
                })
                .collect(),
        })
    }

    /// Swaps the roles of `x1` and `x2`, integer exponents only.
    pub fn swap_variables(&self) -> Result<Self, PolyError> {
        self.linear_substitute(&LinearMap::swap())
    }

    pub fn partial_derivative(&self, axis: Axis, order: u32) -> Self {
        let mut cur = self.clone();
        for _ in 0..order {
            let mut next = PuiseuxPoly::zero();
            for (e, c) in &cur.terms {
                match axis {
                    Axis::X1 => {
                        if e.e1.is_zero() {
                            continue;
                        }
                        next.add_term(Exponent::new(&e.e1 - Rational::one(), e.e2), c * &e.e1);
                    }
                    Axis::X2 => {
                        if e.e2 == 0 {
                            continue;
                        }
                        next.add_term(Exponent::new(e.e1.clone(), e.e2 - 1), c * int(e.e2 as i64));
                    }
                }
            }
            cur = next;
        }
        cur
    }

    pub fn evaluate_f64(&self, x1: f64, x2: f64) -> Result<f64, PolyError> {
        let frac = !self.is_polynomial();
        if frac && x1 <= 0.0 {
            return Err(PolyError::FractionalDomain(x1.to_string()));
        }
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let p1 = if e.e1.is_integer() {
                x1.powi(e.e1.to_integer().to_i32().expect("exponent fits"))
            } else {
                x1.powf(super::to_f64(&e.e1))
            };
            acc += super::to_f64(c) * p1 * x2.powi(e.e2 as i32);
        }
        Ok(acc)
    }

    pub fn evaluate_exact(&self, x1: &Rational, x2: &Rational) -> Result<Rational, PolyError> {
        self.require_polynomial()?;
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let i = e.e1.to_integer().to_i32().expect("exponent fits");
            acc += c * num_traits::pow::Pow::pow(x1, i) * num_traits::pow::Pow::pow(x2, e.e2 as i32);
        }
        Ok(acc)
    }

    /// `P(1, t)`.
    pub fn restrict_x1_one(&self) -> UniPoly {
        let n = self.degree_x2().map_or(0, |d| d as usize + 1);
        let mut c = vec![Rational::zero(); n];
        for (e, v) in &self.terms {
            c[e.e2 as usize] += v;
        }
        UniPoly::from_coeffs(c)
    }

    /// `P(-1, t)`, integer exponents only.
    pub fn restrict_x1_minus_one(&self) -> Result<UniPoly, PolyError> {
        Ok(self.negate_x1()?.restrict_x1_one())
    }

    /// Exact division by `x2^b` if every term has `e2 ≥ b`.
    pub fn divide_x2_power(&self, b: u32) -> Option<Self> {
        if self.terms.keys().any(|e| e.e2 < b) {
            return None;
        }
        Some(PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (Exponent::new(e.e1.clone(), e.e2 - b), c.clone()))
                .collect(),
        })
    }

    /// Long division in `x2` by a divisor whose top `x2`-coefficient is `1`.
    /// Coefficients live in the ring of Puiseux polynomials in `x1`.
    pub fn div_rem_x2(&self, divisor: &PuiseuxPoly) -> Result<(Self, Self), PolyError> {
        let dc = divisor.x2_coefficients();
        let dd = dc.len().checked_sub(1).ok_or(PolyError::Zero)?;
        if dc[dd] != PuiseuxPoly::one() {
            return Err(PolyError::NotMonic);
        }
        let mut rem = self.x2_coefficients();
        if rem.len() <= dd {
            return Ok((PuiseuxPoly::zero(), self.clone()));
        }
        let mut quot = vec![PuiseuxPoly::zero(); rem.len() - dd];
        for k in (0..rem.len() - dd).rev() {
            let c = std::mem::take(&mut rem[k + dd]);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in dc.iter().enumerate().take(dd) {
                rem[k + j] = &rem[k + j] - &(&c * dj);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((
            PuiseuxPoly::from_x2_coefficients(&quot),
            PuiseuxPoly::from_x2_coefficients(&rem),
        ))
    }

    /// Keeps only terms with `e1 < bound` (truncation of series in `x1`).
    pub fn truncate_x1(&self, bound: &Rational) -> Self {
        PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| &e.e1 < bound)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn filter_terms<F: Fn(&Exponent) -> bool>(&self, keep: F) -> Self {
        PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }
}

fn powers(base: &PuiseuxPoly, n: usize) -> Vec<PuiseuxPoly> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(PuiseuxPoly::one());
    for k in 1..=n {
        let next = &out[k - 1] * base;
        out.push(next);
    }
    out
}

impl Add for &PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn add(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn sub(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn mul(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        let mut out = PuiseuxPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(Exponent::new(&ea.e1 + &eb.e1, ea.e2 + eb.e2), ca * cb);
            }
        }
        out
    }
}

impl Neg for &PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn neg(self) -> PuiseuxPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PuiseuxPoly {
            type Output = PuiseuxPoly;
            fn $m(self, rhs: PuiseuxPoly) -> PuiseuxPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn write_power(f: &mut fmt::Formatter<'_>, var: &str, e: &Rational) -> fmt::Result {
    if e.is_one() {
        write!(f, "{var}")
    } else if e.is_integer() {
        write!(f, "{var}^{e}")
    } else {
        write!(f, "{var}^({e})")
    }
}

/// Renders in canonical order, e.g. `x2^2 - 2*x1^2*x2 + x1^4`, and `x1^(3/2)` for
/// fractional powers. The output parses back to the same polynomial.
impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let abs = c.abs();
            let has_vars = !e.e1.is_zero() || e.e2 > 0;
            if !has_vars {
                write!(f, "{abs}")?;
                continue;
            }
            let mut need_star = false;
            if !abs.is_one() {
                write!(f, "{abs}")?;
                need_star = true;
            }
            if !e.e1.is_zero() {
                if need_star {
                    write!(f, "*")?;
                }
                write_power(f, "x1", &e.e1)?;
                need_star = true;
            }
            if e.e2 > 0 {
                if need_star {
                    write!(f, "*")?;
                }
                write_power(f, "x2", &int(e.e2 as i64))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn p(t: &[(i64, u32, u32)]) -> PuiseuxPoly {
        PuiseuxPoly::from_int_terms(t)
    }

    #[test]
    fn shear_cancels_square() {
        let phi = p(&[(1, 0, 1), (-1, 2, 0)]).pow(2);
        let out = phi.shear(&p(&[(1, 2, 0)])).unwrap();
        assert_eq!(out, p(&[(1, 0, 2)]));
        let x2sq = p(&[(1, 0, 2)]);
        assert_eq!(x2sq.shear(&PuiseuxPoly::zero()).unwrap(), x2sq);
    }

    #[test]
    fn shear_rejects_bad_functions() {
        let phi = p(&[(1, 0, 2)]);
        assert_eq!(phi.shear(&p(&[(1, 0, 0)])), Err(PolyError::ShearConstantTerm));
        assert_eq!(phi.shear(&p(&[(1, 1, 1)])), Err(PolyError::ShearDependsOnX2));
    }

    #[test]
    fn linear_examples() {
        let phi = p(&[(1, 2, 0), (-1, 0, 2)]);
        let t = LinearMap::new(int(1), int(1), int(1), int(-1));
        assert_eq!(phi.linear_substitute(&t).unwrap(), p(&[(4, 1, 1)]));
        let sq = p(&[(1, 0, 1), (-1, 1, 0)]).pow(2);
        assert_eq!(
            sq.linear_substitute(&LinearMap::shear_x2(int(1))).unwrap(),
            p(&[(1, 0, 2)])
        );
        let singular = LinearMap::new(int(1), int(2), int(2), int(4));
        assert_eq!(phi.linear_substitute(&singular), Err(PolyError::SingularMap));
    }

    #[test]
    fn derivatives_and_evaluation() {
        assert_eq!(p(&[(1, 0, 2)]).partial_derivative(Axis::X2, 1), p(&[(2, 0, 1)]));
        let frac = PuiseuxPoly::monomial(int(1), rat(3, 2), 0);
        assert_eq!(
            frac.partial_derivative(Axis::X1, 1),
            PuiseuxPoly::monomial(rat(3, 2), rat(1, 2), 0)
        );
        let sq = p(&[(1, 0, 1), (-1, 2, 0)]).pow(2);
        assert_eq!(sq.evaluate_f64(1.0, 1.0).unwrap(), 0.0);
        assert!(frac.evaluate_f64(-1.0, 0.0).is_err());
        assert_eq!(frac.ramification(), BigInt::from(2));
    }

    #[test]
    fn division_by_monic() {
        let a = p(&[(1, 0, 1), (-1, 2, 0), (-1, 3, 0)]);
        let b = p(&[(1, 0, 1), (-1, 2, 0), (-1, 4, 0)]);
        let phi = &a * &b.pow(3);
        let (q, r) = phi.div_rem_x2(&b.pow(3)).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, a);
    }

    #[test]
    fn display() {
        let sq = p(&[(1, 0, 1), (-1, 2, 0)]).pow(2);
        assert_eq!(sq.to_string(), "x2^2 - 2*x1^2*x2 + x1^4");
        let frac = PuiseuxPoly::monomial(rat(-2, 5), rat(3, 2), 1);
        assert_eq!(frac.to_string(), "-2/5*x1^(3/2)*x2");
    }
}
