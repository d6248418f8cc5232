//! Circle vanishing order, adaptedness, linear height and the normal-form classifier.

mod normal_form;

pub use normal_form::{classify_singularity, default_series_order, Family, SingularityClass};

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{AlgebraicRootReport, Error, Result};
use crate::newton::{kappa_principal_part, Face, NewtonPolyhedron, Weight};
use crate::poly::{
    squarefree_real_roots, HalfPlane, LinearMap, PuiseuxPoly, Rational, RootLocation, RootRecord,
};
use crate::varchenko;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Compact principal edge.
    A,
    /// Principal vertex.
    B,
    /// Unbounded principal face.
    C,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptednessVerdict {
    pub adapted: bool,
    pub criterion: Criterion,
    /// `m(φ_pr)`; `None` when the principal face is not a compact edge.
    pub m_pr: Option<u32>,
    pub d: Rational,
    pub face: Face,
    /// Root of multiplicity `> d` on the unit circle when criterion (a) fails.
    pub witness: Option<RootRecord>,
    /// Neither `κ2/κ1` nor `κ1/κ2` is an integer.
    pub non_integer_ratio: bool,
}

impl AdaptednessVerdict {
    pub fn principal_weight(&self) -> Option<&Weight> {
        match &self.face {
            Face::CompactEdge { edge, .. } => Some(&edge.weight),
            _ => None,
        }
    }
}

fn to_u32(q: &Rational) -> Option<u32> {
    if q.is_integer() {
        q.to_integer().to_u32()
    } else {
        None
    }
}

fn is_natural(q: &Rational) -> bool {
    q.is_integer() && q > &Rational::zero()
}

/// Maximal vanishing order of a κ-homogeneous `P` on the unit circle.
pub fn circle_vanishing_order(p: &PuiseuxPoly, w: &Weight) -> Result<u32> {
    Ok(circle_roots(p, w)?.0)
}

/// The order together with the off-axis root of highest multiplicity.
fn circle_roots(p: &PuiseuxPoly, w: &Weight) -> Result<(u32, Option<RootRecord>)> {
    if p.is_zero() {
        return Err(Error::Precondition("zero principal part".into()));
    }
    let homogeneous = p
        .terms()
        .all(|(e, _)| (&w.k1 * &e.e1 + &w.k2 * crate::poly::int(e.e2 as i64)).is_one());
    if !homogeneous {
        return Err(Error::Precondition(format!("polynomial is not {w}-homogeneous")));
    }
    let minus = p.restrict_x1_minus_one()?;
    let plus = p.restrict_x1_one();
    let mut best: Option<RootRecord> = None;
    for (poly, half) in [(&plus, HalfPlane::Plus), (&minus, HalfPlane::Minus)] {
        for mut r in squarefree_real_roots(poly) {
            if r.exact().is_some_and(|c| c.is_zero()) {
                continue;
            }
            r.half_plane = half;
            if best.as_ref().is_none_or(|b| r.multiplicity > b.multiplicity) {
                best = Some(r);
            }
        }
    }
    let axis_x1 = p.min_e2().unwrap_or(0);
    let axis_x2 = p
        .min_e1()
        .and_then(|e| to_u32(&e))
        .ok_or_else(|| Error::Precondition("axis order needs integer exponents".into()))?;
    let order = best
        .as_ref()
        .map_or(0, |b| b.multiplicity)
        .max(axis_x1)
        .max(axis_x2);
    Ok((order, best))
}

/// Adaptedness via the three principal-face criteria.
pub fn is_adapted(phi: &PuiseuxPoly) -> Result<AdaptednessVerdict> {
    let poly = NewtonPolyhedron::of(phi)?;
    let d = poly.distance();
    let face = poly.principal_face();
    match &face {
        Face::Vertex { .. } => Ok(AdaptednessVerdict {
            adapted: true,
            criterion: Criterion::B,
            m_pr: None,
            d,
            face,
            witness: None,
            non_integer_ratio: false,
        }),
        Face::Unbounded { .. } => Ok(AdaptednessVerdict {
            adapted: true,
            criterion: Criterion::C,
            m_pr: None,
            d,
            face,
            witness: None,
            non_integer_ratio: false,
        }),
        Face::CompactEdge { edge, .. } => {
            let w = &edge.weight;
            let part = kappa_principal_part(phi, w)?;
            let (m_pr, root) = circle_roots(&part, w)?;
            let ratio = &w.k2 / &w.k1;
            let non_integer_ratio = !is_natural(&ratio) && !is_natural(&ratio.recip());
            let m_q = crate::poly::int(m_pr as i64);
            let adapted = m_q <= d;
            if non_integer_ratio && m_q >= d {
                return Err(Error::Internal(format!(
                    "non-integer weight ratio {ratio} but m_pr = {m_pr} >= d = {d}"
                )));
            }
            let witness = if adapted {
                None
            } else {
                root.filter(|r| crate::poly::int(r.multiplicity as i64) > d)
            };
            if !adapted && witness.is_none() {
                return Err(Error::Internal("criterion (a) fails on an axis point".into()));
            }
            Ok(AdaptednessVerdict {
                adapted,
                criterion: Criterion::A,
                m_pr: Some(m_pr),
                d,
                face,
                witness,
                non_integer_ratio,
            })
        }
    }
}

/// Rational value of a witness root or an algebraic-root halt.
pub(crate) fn exact_root(r: &RootRecord, context: &str) -> Result<Rational> {
    match &r.location {
        RootLocation::Exact(c) => Ok(c.clone()),
        RootLocation::Interval { lo, hi } => Err(Error::AlgebraicRoot(Box::new(AlgebraicRootReport {
            context: context.to_string(),
            lo: lo.clone(),
            hi: hi.clone(),
            multiplicity: r.multiplicity,
            factor: r.factor.clone(),
        }))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearHeightReport {
    pub h_lin: Rational,
    /// `x = T y` realizing `h_lin`.
    pub transform: LinearMap,
    /// The returned linear coordinates are already adapted.
    pub adapted_linear_exists: bool,
    /// `κ2/κ1` of the principal edge when it exceeds 1.
    pub m: Option<Rational>,
    /// `φ∘T`.
    pub phi_linear: PuiseuxPoly,
}

/// `φ(0) = 0` and `∇φ(0) = 0`: every term has total degree above 1.
pub fn require_critical_point(phi: &PuiseuxPoly) -> Result<()> {
    for (e, _) in phi.terms() {
        if &e.e1 + Rational::from_integer(e.e2.into()) <= Rational::one() {
            let m = PuiseuxPoly::monomial(Rational::one(), e.e1.clone(), e.e2);
            return Err(Error::Precondition(format!("the origin is not a critical point (term {m})")));
        }
    }
    Ok(())
}

/// Linear height by swaps and shears `x2 ↦ x2 + b·x1` until the principal edge
/// has weight ratio at least 2, or the coordinates are adapted.
pub fn linear_height(phi: &PuiseuxPoly) -> Result<LinearHeightReport> {
    require_critical_point(phi)?;
    if !phi.is_polynomial() {
        return Err(Error::Poly(crate::poly::PolyError::FractionalExponents(phi.ramification())));
    }
    let budget = phi.total_degree().and_then(|d| to_u32(&d)).unwrap_or(0) as usize + 4;
    let mut t = LinearMap::identity();
    let mut cur = phi.clone();
    for _ in 0..2 * budget {
        let v = is_adapted(&cur)?;
        if v.adapted {
            return Ok(LinearHeightReport {
                h_lin: v.d,
                transform: t,
                adapted_linear_exists: true,
                m: None,
                phi_linear: cur,
            });
        }
        let w = v.principal_weight().expect("non-adapted means compact edge").clone();
        if w.k1 > w.k2 {
            t = t.compose(&LinearMap::swap());
            cur = cur.swap_variables()?;
            continue;
        }
        let a = &w.k2 / &w.k1;
        if a >= crate::poly::int(2) {
            return Ok(LinearHeightReport {
                h_lin: v.d,
                transform: t,
                adapted_linear_exists: false,
                m: Some(a),
                phi_linear: cur,
            });
        }
        if !a.is_one() {
            return Err(Error::Internal(format!("non-adapted edge with ratio {a}")));
        }
        let b = exact_root(v.witness.as_ref().expect("witness"), "linear shear coefficient")?;
        let s = LinearMap::shear_x2(b);
        cur = cur.linear_substitute(&s)?;
        t = t.compose(&s);
    }
    Err(Error::Budget(2 * budget))
}

/// Height `h(φ)`: the Newton distance in adapted coordinates.
pub fn height(phi: &PuiseuxPoly) -> Result<Rational> {
    let lh = linear_height(phi)?;
    if lh.adapted_linear_exists {
        return Ok(lh.h_lin);
    }
    Ok(varchenko::adapted_coordinates(&lh.phi_linear)?.h)
}
