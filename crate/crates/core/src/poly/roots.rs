use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{Rational, UniPoly};

/// Which half-plane `x1 > 0` / `x1 < 0` a root jet coefficient belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HalfPlane {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RootLocation {
    Exact(Rational),
    /// Open interval containing exactly one root of the square-free factor.
    Interval { lo: Rational, hi: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootRecord {
    pub location: RootLocation,
    pub multiplicity: u32,
    pub half_plane: HalfPlane,
    /// The square-free factor of the input that vanishes here.
    pub factor: UniPoly,
}

impl RootRecord {
    pub fn exact(&self) -> Option<&Rational> {
        match &self.location {
            RootLocation::Exact(r) => Some(r),
            RootLocation::Interval { .. } => None,
        }
    }

    pub fn approx(&self) -> f64 {
        match &self.location {
            RootLocation::Exact(r) => super::to_f64(r),
            RootLocation::Interval { lo, hi } => super::to_f64(&((lo + hi) / super::int(2))),
        }
    }

    fn sort_key(&self) -> Rational {
        match &self.location {
            RootLocation::Exact(r) => r.clone(),
            RootLocation::Interval { lo, .. } => lo.clone(),
        }
    }
}

/// All real roots of `p` with exact multiplicities, sorted increasingly.
/// Rational roots are reported exactly, irrational ones by isolating intervals.
///
/// Panics if `p` is zero.
pub fn squarefree_real_roots(p: &UniPoly) -> Vec<RootRecord> {
    assert!(!p.is_zero(), "real roots of the zero polynomial");
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for location in isolate_squarefree(&factor) {
            out.push(RootRecord {
                location,
                multiplicity: mult,
                half_plane: HalfPlane::Plus,
                factor: factor.clone(),
            });
        }
    }
    out.sort_by_key(|r| r.sort_key());
    out
}

/// Descartes bound for the number of roots of `p` in the open interval `(a, b)`.
fn variations_in(p: &UniPoly, a: &Rational, b: &Rational) -> usize {
    // p(a + (b-a) y), y in (0,1)  ->  reverse  ->  shift by 1: roots in (0, inf).
    let scaled = p.compose_affine(a, &(b - a));
    let n = scaled.degree().unwrap_or(0);
    let mut rev = scaled.coeffs().to_vec();
    rev.resize(n + 1, Rational::zero());
    rev.reverse();
    UniPoly::from_coeffs(rev)
        .compose_affine(&Rational::one(), &Rational::one())
        .sign_variations()
}

fn cauchy_bound(p: &UniPoly) -> Rational {
    let lc = p.leading().expect("nonzero").abs();
    let m = p
        .coeffs()
        .iter()
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

fn isolate_squarefree(p: &UniPoly) -> Vec<RootLocation> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    let bound = cauchy_bound(p);
    let mut exact = Vec::new();
    let mut intervals = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        match variations_in(p, &a, &b) {
            0 => {}
            1 => intervals.push((a, b)),
            _ => {
                let mid = (&a + &b) / super::int(2);
                if p.eval(&mid).is_zero() {
                    exact.push(mid.clone());
                }
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
    }
    let lc_den = primitive_leading(p);
    let mut out: Vec<RootLocation> = exact.into_iter().map(RootLocation::Exact).collect();
    for (a, b) in intervals {
        out.push(refine_and_identify(p, a, b, &lc_den));
    }
    out
}

/// Absolute leading coefficient of the primitive integer multiple of `p`.
fn primitive_leading(p: &UniPoly) -> BigInt {
    let mut den = BigInt::one();
    for c in p.coeffs() {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    (ints.last().expect("nonzero") / g).abs()
}

/// Shrinks an isolating interval until at most one fraction with denominator
/// dividing the leading coefficient fits inside, then tests the simplest fraction.
fn refine_and_identify(p: &UniPoly, mut a: Rational, mut b: Rational, lc: &BigInt) -> RootLocation {
    let lc_q = Rational::from_integer(lc.clone());
    let target = (&lc_q * &lc_q * super::int(2)).recip();
    while &b - &a >= target {
        let mid = (&a + &b) / super::int(2);
        if p.eval(&mid).is_zero() {
            return RootLocation::Exact(mid);
        }
        if variations_in(p, &a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let cand = simplest_between(&a, &b);
    if p.eval(&cand).is_zero() {
        return RootLocation::Exact(cand);
    }
    RootLocation::Interval { lo: a, hi: b }
}

/// The fraction with the smallest denominator in the closed interval `[lo, hi]`.
pub(crate) fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

fn sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

    #[test]
    fn exact_and_interval_roots() {
        let p = &UniPoly::from_i64(&[-1, 1]).pow(3) * &UniPoly::from_i64(&[2, 1]);
        let r = squarefree_real_roots(&p);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].exact(), Some(&int(-2)));
        assert_eq!(r[0].multiplicity, 1);
        assert_eq!(r[1].exact(), Some(&int(1)));
        assert_eq!(r[1].multiplicity, 3);
        assert!(squarefree_real_roots(&UniPoly::from_i64(&[1, 0, 1])).is_empty());
    }

    #[test]
    fn cube_root_of_two_is_isolated() {
        let r = squarefree_real_roots(&UniPoly::from_i64(&[-2, 0, 0, 1]));
        assert_eq!(r.len(), 1);
        match &r[0].location {
            RootLocation::Interval { lo, hi } => {
                assert!(*lo >= int(1) && *hi <= int(2));
                // sign-change oracle on the endpoints
                let p = UniPoly::from_i64(&[-2, 0, 0, 1]);
                assert!(sign(&p.eval(lo)) * sign(&p.eval(hi)) < 0);
            }
            other => panic!("expected interval, got {other:?}"),
        }
    }

    #[test]
    fn non_dyadic_rational_roots_are_exact() {
        // (3t - 1)(7t + 2)^2
        let p = &UniPoly::from_i64(&[-1, 3]) * &UniPoly::from_i64(&[2, 7]).pow(2);
        let r = squarefree_real_roots(&p);
        assert_eq!(r[0].exact(), Some(&rat(-2, 7)));
        assert_eq!(r[0].multiplicity, 2);
        assert_eq!(r[1].exact(), Some(&rat(1, 3)));
    }

    #[test]
    fn simplest_fraction() {
        assert_eq!(simplest_between(&rat(3, 10), &rat(4, 10)), rat(1, 3));
        assert_eq!(simplest_between(&rat(-7, 5), &rat(-6, 5)), rat(-4, 3));
        assert_eq!(simplest_between(&rat(1, 2), &rat(3, 2)), int(1));
    }
}
