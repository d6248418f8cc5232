//! Newton polyhedra, principal faces, edge weights and r-heights.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{int, PuiseuxPoly, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("zero polynomial has empty Taylor support")]
    EmptySupport,
    #[error("line {0} is not a supporting line of the Newton polyhedron")]
    NotSupporting(Weight),
    #[error("weight {0} is degenerate for this operation")]
    DegenerateWeight(Weight),
    #[error("r-height mismatch: formula gives {formula}, geometry gives {geometric}")]
    RHeightMismatch { formula: Rational, geometric: Rational },
}

/// A point `(t1, t2)` of exponent space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub t1: Rational,
    pub t2: Rational,
}

pub type SupportPoint = Point;

impl Point {
    pub fn new(t1: Rational, t2: Rational) -> Self {
        Point { t1, t2 }
    }

    pub fn int(t1: i64, t2: i64) -> Self {
        Point::new(int(t1), int(t2))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t1, self.t2)
    }
}

/// Line `k1·t1 + k2·t2 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub k1: Rational,
    pub k2: Rational,
}

impl Weight {
    pub fn new(k1: Rational, k2: Rational) -> Self {
        Weight { k1, k2 }
    }

    pub fn eval(&self, p: &Point) -> Rational {
        &self.k1 * &p.t1 + &self.k2 * &p.t2
    }

    pub fn norm(&self) -> Rational {
        &self.k1 + &self.k2
    }

    /// `k2 / k1`, `None` for the horizontal weight.
    pub fn ratio(&self) -> Option<Rational> {
        if self.k1.is_zero() {
            None
        } else {
            Some(&self.k2 / &self.k1)
        }
    }

    /// Bisectrix point of the line, `1/(k1+k2)`.
    pub fn distance(&self) -> Rational {
        self.norm().recip()
    }

    /// The line through two points, if it does not pass through the origin.
    pub fn through(p: &Point, q: &Point) -> Option<Weight> {
        let det = &p.t1 * &q.t2 - &q.t1 * &p.t2;
        if det.is_zero() {
            return None;
        }
        Some(Weight::new((&q.t2 - &p.t2) / &det, (&p.t1 - &q.t1) / &det))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub left: Point,
    pub right: Point,
    pub weight: Weight,
}

impl Edge {
    /// `a_l = κ2/κ1`.
    pub fn a(&self) -> Rational {
        self.weight.ratio().expect("compact edges have k1 > 0")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ray {
    Vertical,
    Horizontal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    Vertex { index: usize, point: Point },
    CompactEdge { index: usize, edge: Edge },
    Unbounded { ray: Ray, vertex_index: usize, point: Point },
}

impl Face {
    pub fn kind(&self) -> &'static str {
        match self {
            Face::Vertex { .. } => "vertex",
            Face::CompactEdge { .. } => "compact_edge",
            Face::Unbounded { .. } => "unbounded_edge",
        }
    }
}

/// Vertices `(A_l, B_l)` with `A` increasing and `B` decreasing, compact edges
/// between consecutive vertices, a vertical ray above the first vertex and a
/// horizontal ray right of the last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPolyhedron {
    vertices: Vec<Point>,
    edges: Vec<Edge>,
}

/// Exponents with nonzero coefficient.
pub fn taylor_support(phi: &PuiseuxPoly) -> Result<Vec<Point>, GeometryError> {
    if phi.is_zero() {
        return Err(GeometryError::EmptySupport);
    }
    Ok(phi
        .terms()
        .map(|(e, _)| Point::new(e.e1.clone(), int(e.e2 as i64)))
        .collect())
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.t1 - &o.t1) * (&b.t2 - &o.t2) - (&a.t2 - &o.t2) * (&b.t1 - &o.t1)
}

/// Pareto-minimal staircase first, then the lower-left convex chain.
pub fn newton_polyhedron(support: &[Point]) -> Result<NewtonPolyhedron, GeometryError> {
    if support.is_empty() {
        return Err(GeometryError::EmptySupport);
    }
    let mut pts = support.to_vec();
    pts.sort();
    pts.dedup();
    let mut stair: Vec<Point> = Vec::new();
    for p in pts {
        if stair.last().is_none_or(|l| p.t2 < l.t2) {
            stair.push(p);
        }
    }
    let mut chain: Vec<Point> = Vec::new();
    for p in stair {
        while chain.len() >= 2 && cross(&chain[chain.len() - 2], &chain[chain.len() - 1], &p) <= Rational::zero() {
            chain.pop();
        }
        chain.push(p);
    }
    let edges = chain
        .windows(2)
        .map(|w| Edge {
            left: w[0].clone(),
            right: w[1].clone(),
            weight: Weight::through(&w[0], &w[1]).expect("staircase edges avoid the origin"),
        })
        .collect();
    Ok(NewtonPolyhedron { vertices: chain, edges })
}

impl NewtonPolyhedron {
    pub fn of(phi: &PuiseuxPoly) -> Result<Self, GeometryError> {
        newton_polyhedron(&taylor_support(phi)?)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn first(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Point {
        self.vertices.last().expect("nonempty")
    }

    /// Weight `(0, 1/B_n)` of the horizontal ray, if it lies above `t2 = 0`.
    pub fn horizontal_weight(&self) -> Option<Weight> {
        let b = &self.last().t2;
        if b.is_zero() {
            None
        } else {
            Some(Weight::new(Rational::zero(), b.recip()))
        }
    }

    pub fn vertex_index(&self, p: &Point) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    /// Membership in the closed polyhedron.
    pub fn contains(&self, p: &Point) -> bool {
        if p.t1 < self.first().t1 || p.t2 < self.last().t2 {
            return false;
        }
        self.edges.iter().all(|e| e.weight.eval(p) >= Rational::one())
    }

    pub fn min_weighted(&self, w: &Weight) -> Rational {
        self.vertices
            .iter()
            .map(|v| w.eval(v))
            .min()
            .expect("nonempty")
    }

    pub fn is_supporting(&self, w: &Weight) -> bool {
        self.min_weighted(w).is_one()
    }

    /// Newton distance `d`: first coordinate of the bisectrix hit on the boundary.
    pub fn distance(&self) -> Rational {
        match self.principal_face() {
            Face::Vertex { point, .. } => point.t1,
            Face::CompactEdge { edge, .. } => edge.weight.distance(),
            Face::Unbounded { ray: Ray::Vertical, point, .. } => point.t1,
            Face::Unbounded { ray: Ray::Horizontal, point, .. } => point.t2,
        }
    }

    /// Minimal-dimension face containing `(d, d)`. A vertex wins ties.
    pub fn principal_face(&self) -> Face {
        let first = self.first();
        if first.t1 > first.t2 {
            return Face::Unbounded {
                ray: Ray::Vertical,
                vertex_index: 0,
                point: first.clone(),
            };
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.t1 == v.t2 {
                return Face::Vertex { index: i, point: v.clone() };
            }
            if v.t1 > v.t2 {
                return Face::CompactEdge {
                    index: i - 1,
                    edge: self.edges[i - 1].clone(),
                };
            }
        }
        let n = self.vertices.len() - 1;
        Face::Unbounded {
            ray: Ray::Horizontal,
            vertex_index: n,
            point: self.last().clone(),
        }
    }

    /// Supporting line whose weight ratio `k2/k1` equals `m0`.
    pub fn supporting_line_with_ratio(&self, m0: &Rational) -> Result<Weight, GeometryError> {
        let probe = Weight::new(Rational::one(), m0.clone());
        let c = self.min_weighted(&probe);
        if c.is_zero() || m0 <= &Rational::zero() {
            return Err(GeometryError::DegenerateWeight(probe));
        }
        Ok(Weight::new(c.recip(), m0 / &c))
    }
}

/// `φ_κ`: terms on the supporting line `κ·t = 1`.
pub fn kappa_principal_part(phi: &PuiseuxPoly, w: &Weight) -> Result<PuiseuxPoly, GeometryError> {
    let poly = NewtonPolyhedron::of(phi)?;
    if !poly.is_supporting(w) {
        return Err(GeometryError::NotSupporting(w.clone()));
    }
    Ok(phi.filter_terms(|e| (&w.k1 * &e.e1 + &w.k2 * int(e.e2 as i64)).is_one()))
}

/// `h_l = (1 + m·κ1 − κ2)/(κ1 + κ2)`; equals `B_n − 1` on the horizontal weight.
pub fn h_l_of_edge(w: &Weight, m: &Rational) -> Rational {
    (Rational::one() + m * &w.k1 - &w.k2) / w.norm()
}

/// Both computations of the r-height relative to a supporting line `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RHeight {
    pub value: Rational,
    pub line: Weight,
    pub m: Rational,
    /// Bisectrix coordinate of `L`.
    pub d_line: Rational,
    /// Lowest point of `𝒩 ∩ L`; the augmented boundary follows `L` above it.
    pub anchor: Point,
    pub anchor_index: usize,
    /// `(edge index, h_l)` for every compact edge steeper than `L`.
    pub edge_heights: Vec<(usize, Rational)>,
    /// `B_n − 1`.
    pub horizontal_height: Rational,
    /// Where `Δ^(m) = {(t, t+m+1)}` crosses the augmented boundary.
    pub crossing: Point,
}

/// r-height of `𝒩` relative to the supporting line `L`, computed from the edge
/// formula and from the augmented polyhedron; a disagreement is an error.
pub fn augmented_height(poly: &NewtonPolyhedron, line: &Weight) -> Result<RHeight, GeometryError> {
    let m = line
        .ratio()
        .ok_or_else(|| GeometryError::DegenerateWeight(line.clone()))?;
    if !poly.is_supporting(line) {
        return Err(GeometryError::NotSupporting(line.clone()));
    }
    let anchor_index = poly
        .vertices
        .iter()
        .rposition(|v| line.eval(v).is_one())
        .expect("supporting line touches a vertex");
    let anchor = poly.vertices[anchor_index].clone();
    let d_line = line.distance();

    let edge_heights: Vec<(usize, Rational)> = (anchor_index..poly.edges.len())
        .map(|i| (i, h_l_of_edge(&poly.edges[i].weight, &m)))
        .collect();
    let horizontal_height = &poly.last().t2 - Rational::one();
    let mut formula = d_line.clone();
    for (_, h) in &edge_heights {
        if *h > formula {
            formula = h.clone();
        }
    }
    if horizontal_height > formula {
        formula = horizontal_height.clone();
    }

    let shift = &m + Rational::one();
    let g = |p: &Point| &p.t2 - &p.t1 - &shift;
    let ga = g(&anchor);
    let crossing = if ga <= Rational::zero() {
        let s = -ga / &shift;
        Point::new(&anchor.t1 - &s * &m, &anchor.t2 + &s)
    } else {
        let mut hit = None;
        for k in anchor_index + 1..poly.vertices.len() {
            let gk = g(&poly.vertices[k]);
            if gk <= Rational::zero() {
                let prev = &poly.vertices[k - 1];
                let gp = g(prev);
                let lam = &gp / (&gp - &gk);
                let cur = &poly.vertices[k];
                hit = Some(Point::new(
                    &prev.t1 + &lam * (&cur.t1 - &prev.t1),
                    &prev.t2 + &lam * (&cur.t2 - &prev.t2),
                ));
                break;
            }
        }
        hit.unwrap_or_else(|| {
            let b = poly.last().t2.clone();
            Point::new(&b - &shift, b)
        })
    };
    let geometric = &crossing.t2 - Rational::one();
    if geometric != formula {
        return Err(GeometryError::RHeightMismatch { formula, geometric });
    }
    Ok(RHeight {
        value: formula,
        line: line.clone(),
        m,
        d_line,
        anchor,
        anchor_index,
        edge_heights,
        horizontal_height,
        crossing,
    })
}

/// r-height of adapted `φ^a` for the principal line `L` of the original
/// coordinates, where `m = κ2/κ1` of `L`.
pub fn r_height(phi_a: &PuiseuxPoly, m: &Rational, line: &Weight) -> Result<RHeight, GeometryError> {
    if line.ratio().as_ref() != Some(m) {
        return Err(GeometryError::DegenerateWeight(line.clone()));
    }
    augmented_height(&NewtonPolyhedron::of(phi_a)?, line)
}
