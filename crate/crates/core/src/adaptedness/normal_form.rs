//! Type A / D normal forms `φ = b·(x2 − ψ(x1))² + b0(x1)` for linear height below 2.

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::linear_height;
use crate::error::{Error, Result};
use crate::poly::{int, Exponent, LinearMap, PuiseuxPoly, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    A,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityClass {
    pub family: Family,
    /// `A_{n−1}` or `D_{n+1}`; `None` for `n = ∞`.
    pub index: Option<u32>,
    pub m: u32,
    /// Order of `b0`; `None` for `n = ∞`.
    pub n: Option<u32>,
    /// `ψ` in the normalized coordinates, exact when `psi_exact`.
    pub psi_truncation: PuiseuxPoly,
    pub psi_exact: bool,
    /// Normalizing linear map `x = T y`.
    pub transform: LinearMap,
    /// `b0` is known to vanish below this order (`n = ∞` is certified when `psi_exact`).
    pub certified_order: u32,
    pub d: Rational,
}

/// Default truncation order: at least `4·D + 4`, and large enough that a
/// finite intersection multiplicity (at most `D(D−1)`) is always seen.
pub fn default_series_order(phi: &PuiseuxPoly) -> usize {
    let deg = phi
        .total_degree()
        .and_then(|d| d.to_integer().to_usize())
        .unwrap_or(0);
    (4 * deg + 4).max(deg * deg.saturating_sub(1) + 1)
}

/// Dense truncated series in `x1`.
type Series = Vec<Rational>;

fn series_mul(a: &Series, b: &Series, len: usize) -> Series {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients `F_j(x1)` as dense series truncated at `len`.
fn x2_series(f: &PuiseuxPoly, len: usize) -> Vec<Series> {
    f.x2_coefficients()
        .iter()
        .map(|c| {
            let mut s = vec![Rational::zero(); len];
            for (e, v) in c.terms() {
                let k = e.e1.to_integer().to_usize().expect("integer exponent");
                if k < len {
                    s[k] = v.clone();
                }
            }
            s
        })
        .collect()
}

/// `F(x1, ψ(x1)) mod x1^len`.
fn compose_truncated(f: &[Series], psi: &Series, len: usize) -> Series {
    let mut acc = vec![Rational::zero(); len];
    for fj in f.iter().rev() {
        acc = series_mul(&acc, psi, len);
        for (a, b) in acc.iter_mut().zip(fj.iter()) {
            *a += b;
        }
    }
    acc
}

/// Repeated linear factor `ℓ2` and cofactor `ℓ1` of a binary cubic with `P3 = ℓ1·ℓ2²`,
/// as coefficient pairs `(coeff of x1, coeff of x2)`.
fn split_cubic(p3: &PuiseuxPoly) -> Option<((Rational, Rational), (Rational, Rational))> {
    let g = p3.restrict_x1_one();
    let pk = |k: usize| g.coeff(k);
    if pk(3).is_zero() && pk(2).is_zero() {
        // x1²·(p0 x1 + p1 x2)
        return Some(((Rational::one(), Rational::zero()), (pk(0), pk(1))));
    }
    for (factor, mult) in g.squarefree_decomposition() {
        if mult == 2 && factor.degree() == Some(1) {
            let c = -factor.coeff(0);
            let (rest, rem) = g.div_rem(&factor.pow(2));
            debug_assert!(rem.is_zero());
            let (v, u) = (rest.coeff(0), rest.coeff(1));
            return Some(((-c, Rational::one()), (v, u)));
        }
    }
    None
}

fn normalizing_map(phi: &PuiseuxPoly) -> Result<(Family, LinearMap)> {
    let deg2 = phi.filter_terms(|e| &e.e1 + int(e.e2 as i64) == int(2));
    if !deg2.is_zero() {
        let c = |a: u32, b: u32| deg2.coeff(&Exponent::int(a, b));
        let (p, q, r) = (c(2, 0), c(1, 1), c(0, 2));
        if &q * &q != int(4) * &p * &r {
            return Err(Error::Precondition("nondegenerate Hessian".into()));
        }
        let t = if !r.is_zero() {
            LinearMap::shear_x2(-(&q / (int(2) * &r)))
        } else {
            LinearMap::swap()
        };
        return Ok((Family::A, t));
    }
    let deg3 = phi.filter_terms(|e| &e.e1 + int(e.e2 as i64) == int(3));
    let ((al, be), (ga, de)) = split_cubic(&deg3)
        .ok_or_else(|| Error::Precondition("cubic part is not of the form l1*l2^2".into()))?;
    // y1 = ga x1 + de x2, y2 = al x1 + be x2.
    let m = LinearMap::new(ga, de, al, be);
    let t = m
        .inverse()
        .ok_or_else(|| Error::Precondition("cubic part is a perfect cube".into()))?;
    Ok((Family::D, t))
}

/// Solves `∂2φ(x1, ψ(x1)) = 0` term by term and reads off `n = ord φ(x1, ψ(x1))`.
pub fn classify_singularity(phi: &PuiseuxPoly, series_order: Option<usize>) -> Result<SingularityClass> {
    let lh = linear_height(phi)?;
    if lh.adapted_linear_exists {
        return Err(Error::Precondition("an adapted linear coordinate system exists".into()));
    }
    if lh.h_lin >= int(2) {
        return Err(Error::Precondition(format!("linear height {} is not below 2", lh.h_lin)));
    }
    let order = series_order.unwrap_or_else(|| default_series_order(phi));
    let (family, t) = normalizing_map(phi)?;
    let phin = phi.linear_substitute(&t)?;
    let f = phin.partial_derivative(crate::poly::Axis::X2, 1);
    // Pivot: coefficient of x2 (type A) or x1·x2 (type D) in ∂2φ.
    let (pivot, lag) = match family {
        Family::A => (f.coeff(&Exponent::int(0, 1)), 0usize),
        Family::D => (f.coeff(&Exponent::int(1, 1)), 1usize),
    };
    if pivot.is_zero() {
        return Err(Error::Internal("normalization left a zero pivot".into()));
    }
    // ψ to order K gives b0 exactly below 2K + 2.
    let k_max = order.div_ceil(2).max(1);
    let len = k_max + lag + 2;
    let fser = x2_series(&f, len);
    let mut psi: Series = vec![Rational::zero(); len];
    for k in 1..=k_max {
        let r = compose_truncated(&fser, &psi, k + lag + 1);
        psi[k] = -&r[k + lag] / &pivot;
    }
    psi.truncate(k_max + 1);
    let psi_poly = PuiseuxPoly::from_terms(
        psi.iter()
            .enumerate()
            .map(|(k, c)| (Exponent::int(k as u32, 0), c.clone())),
    );
    let residual = f.shear(&psi_poly)?.x2_coefficients()[0].clone();
    let psi_exact = residual.is_zero();
    let b0 = phin.shear(&psi_poly)?.x2_coefficients()[0].clone();
    let b0_bound = int(2 * k_max as i64 + 2);
    let b0_valid = if psi_exact { b0.clone() } else { b0.truncate_x1(&b0_bound) };

    let m = psi_poly
        .leading_x1_term()
        .map(|(_, e)| e.to_integer().to_u32().expect("small"))
        .ok_or_else(|| Error::Precondition("ψ vanishes: coordinates are adapted".into()))?;
    let n = b0_valid
        .leading_x1_term()
        .map(|(_, e)| e.to_integer().to_u32().expect("small"));
    let certified_order = if psi_exact { u32::MAX } else { 2 * k_max as u32 + 2 };
    if n.is_none() && !psi_exact && (certified_order as usize) < order {
        return Err(Error::Truncation {
            order,
            detail: format!("b0 vanishes to order {certified_order} only"),
        });
    }
    let (expected_d, min_n) = match family {
        Family::A => (Rational::new((2 * m).into(), (m + 1).into()), 2 * m + 1),
        Family::D => (Rational::new((2 * m + 1).into(), (m + 1).into()), 2 * m + 2),
    };
    if expected_d != lh.h_lin {
        return Err(Error::Internal(format!(
            "normal form predicts d = {expected_d}, linear height is {}",
            lh.h_lin
        )));
    }
    if let Some(n) = n {
        if n < min_n {
            return Err(Error::Internal(format!("n = {n} below the bound {min_n}")));
        }
    }
    let index = n.map(|n| match family {
        Family::A => n - 1,
        Family::D => n + 1,
    });
    Ok(SingularityClass {
        family,
        index,
        m,
        n,
        psi_truncation: psi_poly,
        psi_exact,
        transform: t,
        certified_order,
        d: lh.h_lin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: &[(i64, u32, u32)]) -> PuiseuxPoly {
        PuiseuxPoly::from_int_terms(t)
    }

    fn sq() -> PuiseuxPoly {
        p(&[(1, 0, 1), (-1, 2, 0)]).pow(2)
    }

    #[test]
    fn type_a_examples() {
        let c = classify_singularity(&(&sq() + &p(&[(1, 5, 0)])), None).unwrap();
        assert_eq!((c.family, c.m, c.n, c.index), (Family::A, 2, Some(5), Some(4)));
        let c = classify_singularity(&sq(), None).unwrap();
        assert_eq!((c.family, c.n), (Family::A, None));
        assert!(c.psi_exact);
    }

    #[test]
    fn type_d_example() {
        let phi = &(&p(&[(1, 1, 0)]) * &sq()) + &p(&[(1, 7, 0)]);
        let c = classify_singularity(&phi, None).unwrap();
        assert_eq!((c.family, c.m, c.n, c.index), (Family::D, 2, Some(7), Some(8)));
        assert_eq!(c.d, Rational::new(5.into(), 3.into()));
    }

    #[test]
    fn non_polynomial_root_is_flat() {
        // (x2(1 − x1) − x1²)² has ψ = x1²/(1 − x1), a genuine series.
        let base = p(&[(1, 0, 1), (-1, 1, 1), (-1, 2, 0)]).pow(2);
        let c = classify_singularity(&base, None).unwrap();
        assert_eq!(c.n, None);
        assert!(!c.psi_exact);
        assert_eq!(c.m, 2);
    }
}
