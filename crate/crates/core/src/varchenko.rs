//! Adapted coordinates via principal root jets, the `l_pr` case analysis, the
//! fine-splitting forest and the factorization check for Condition (R).

use num_traits::{One, Zero};
use serde::Serialize;

use crate::adaptedness::{exact_root, is_adapted, require_critical_point};
use crate::error::{AlgebraicRootReport, Error, Result};
use crate::newton::{kappa_principal_part, Edge, Face, NewtonPolyhedron, Point, Ray, Weight};
use crate::poly::{int, squarefree_real_roots, Exponent, HalfPlane, PuiseuxPoly, Rational, RootLocation, RootRecord};

pub const DEFAULT_STEP_BUDGET: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetTerm {
    pub coeff: Rational,
    pub exponent: Rational,
    pub half_plane: HalfPlane,
}

/// `ψ(x1) = Σ c_j x1^{e_j}` with strictly increasing exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootJet {
    pub terms: Vec<JetTerm>,
}

impl RootJet {
    pub fn zero() -> Self {
        RootJet::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Builds a jet from a univariate Puiseux polynomial in `x1`.
    pub fn from_poly(f: &PuiseuxPoly) -> Result<Self> {
        if f.depends_on_x2() {
            return Err(Error::Precondition("jet depends on x2".into()));
        }
        Ok(RootJet {
            terms: f
                .terms()
                .map(|(e, c)| JetTerm {
                    coeff: c.clone(),
                    exponent: e.e1.clone(),
                    half_plane: HalfPlane::Plus,
                })
                .collect(),
        })
    }

    pub fn leading_exponent(&self) -> Option<&Rational> {
        self.terms.first().map(|t| &t.exponent)
    }

    pub fn to_poly(&self) -> PuiseuxPoly {
        PuiseuxPoly::from_terms(
            self.terms
                .iter()
                .map(|t| (Exponent::new(t.exponent.clone(), 0), t.coeff.clone())),
        )
    }

    fn push(&mut self, coeff: Rational, exponent: Rational, half_plane: HalfPlane) {
        debug_assert!(self.leading_exponent().is_none_or(|_| self.terms.last().unwrap().exponent < exponent));
        self.terms.push(JetTerm { coeff, exponent, half_plane });
    }
}

impl std::fmt::Display for RootJet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// One shear `x2 ↦ x2 − c·x1^a` of the adapted-coordinate iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarchenkoStep {
    pub weight: Weight,
    pub exponent: Rational,
    pub coeff: Rational,
    pub multiplicity: u32,
    pub d_before: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedCoordinates {
    pub psi: RootJet,
    pub phi_a: PuiseuxPoly,
    pub h: Rational,
    /// Principal weight of the input coordinates when they are not adapted.
    pub principal_line: Option<Weight>,
    pub steps: Vec<VarchenkoStep>,
}

impl AdaptedCoordinates {
    /// `m = κ2/κ1` of the principal line of the input coordinates.
    pub fn m(&self) -> Option<Rational> {
        self.principal_line.as_ref().and_then(Weight::ratio)
    }
}

/// Shears away the root of the principal part of multiplicity `> d` until
/// the coordinates are adapted.
pub fn adapted_coordinates(phi: &PuiseuxPoly) -> Result<AdaptedCoordinates> {
    adapted_coordinates_with_budget(phi, DEFAULT_STEP_BUDGET)
}

pub fn adapted_coordinates_with_budget(phi: &PuiseuxPoly, budget: usize) -> Result<AdaptedCoordinates> {
    require_critical_point(phi)?;
    let mut cur = phi.clone();
    let mut psi = RootJet::zero();
    let mut steps = Vec::new();
    let mut principal_line = None;
    for _ in 0..budget {
        let v = is_adapted(&cur)?;
        if v.adapted {
            return Ok(AdaptedCoordinates {
                psi,
                phi_a: cur,
                h: v.d,
                principal_line,
                steps,
            });
        }
        let w = v.principal_weight().expect("non-adapted means compact edge").clone();
        if principal_line.is_none() {
            principal_line = Some(w.clone());
        }
        let a = w.ratio().expect("compact edge");
        if !a.is_integer() {
            return Err(Error::Internal(format!("non-adapted edge with non-integer ratio {a}")));
        }
        if psi.is_zero() && a < int(2) {
            return Err(Error::Precondition(format!(
                "coordinates are not linearly adapted (principal ratio {a})"
            )));
        }
        let witness = v.witness.as_ref().expect("witness");
        let mut c = exact_root(witness, "principal root jet coefficient")?;
        if witness.half_plane == HalfPlane::Minus && a.to_integer().bit(0) {
            c = -c;
        }
        let f = PuiseuxPoly::monomial(c.clone(), a.clone(), 0);
        cur = cur.shear(&f)?;
        steps.push(VarchenkoStep {
            weight: w,
            exponent: a.clone(),
            coeff: c.clone(),
            multiplicity: witness.multiplicity,
            d_before: v.d,
        });
        psi.push(c, a, HalfPlane::Plus);
    }
    Err(Error::Budget(budget))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LprCase {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c1")]
    C1,
    #[serde(rename = "c2")]
    C2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LprSelection {
    pub case: LprCase,
    /// 1-based edge index `l_pr`, edges numbered `γ_1, …, γ_n` left to right.
    pub l_pr: usize,
    /// Exponent `a` of the domain `D_pr = {|x2 − ψ(x1)| ≤ N·x1^a}`.
    pub a: Rational,
    pub face: Face,
}

/// Case (a)/(b)/(c1)/(c2) by the shape of the principal face of `φ^a`.
pub fn select_l_pr(phi_a: &PuiseuxPoly, m: &Rational) -> Result<LprSelection> {
    let poly = NewtonPolyhedron::of(phi_a)?;
    select_l_pr_for(&poly, m)
}

pub fn select_l_pr_for(poly: &NewtonPolyhedron, m: &Rational) -> Result<LprSelection> {
    let face = poly.principal_face();
    let edges = poly.edges();
    let (case, l_pr, a) = match &face {
        Face::CompactEdge { index, edge } => (LprCase::A, index + 1, edge.a()),
        Face::Vertex { index, .. } => {
            if *index == 0 {
                return Err(Error::Precondition("principal vertex has no edge on its left".into()));
            }
            (LprCase::B, index + 1, edges[index - 1].a())
        }
        Face::Unbounded { ray: Ray::Horizontal, vertex_index, .. } => {
            if *vertex_index == 0 {
                (LprCase::C2, 1, m.clone())
            } else {
                (LprCase::C1, vertex_index + 1, edges[vertex_index - 1].a())
            }
        }
        Face::Unbounded { ray: Ray::Vertical, .. } => {
            return Err(Error::Precondition("vertical principal face".into()));
        }
    };
    Ok(LprSelection { case, l_pr, a, face })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepCase {
    /// `∂2 φ_κ(v) ≠ 0`.
    #[serde(rename = "case1_no_root")]
    Case1NoRoot,
    /// `∂2 φ_κ(v) = 0`, `∂1 φ_κ(v) ≠ 0`.
    #[serde(rename = "case2_grad_nonzero")]
    Case2GradNonzero,
    /// `∇φ_κ(v) = 0`: shear by the root.
    #[serde(rename = "case3_shear")]
    Case3Shear,
    #[serde(rename = "caseA_stop")]
    CaseAStop,
    #[serde(rename = "caseB_continue")]
    CaseBContinue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitStep {
    pub level: usize,
    pub weight: Weight,
    pub exponent: Rational,
    /// The point `v = (1, c0)`; `None` on stop/continue markers.
    pub root: Option<RootRecord>,
    pub multiplicity: u32,
    pub case: StepCase,
    /// `(A'_(l), B'_(l))` after a Case 3 shear.
    pub vertex_after: Option<Point>,
    /// Vertices strictly above the bisectrix unchanged by the shear.
    pub above_bisectrix_preserved: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// No root of multiplicity at least 2 at the last level: only Cases 1 and 2.
    NoMultipleRoot,
    /// `𝒩(φ^(l+1)) ⊂ {t2 ≥ M_l}`.
    Stop,
    AlgebraicRootHalt(Box<AlgebraicRootReport>),
    BudgetExceeded,
}

impl Terminal {
    pub fn tag(&self) -> &'static str {
        match self {
            Terminal::NoMultipleRoot => "no_multiple_root",
            Terminal::Stop => "stop",
            Terminal::AlgebraicRootHalt(_) => "algebraic_root_halt",
            Terminal::BudgetExceeded => "budget_exceeded",
        }
    }
}

/// `φ = (x2 − jet)^multiplicity · cofactor` in the input coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub jet: RootJet,
    pub multiplicity: u32,
    pub cofactor: PuiseuxPoly,
}

/// One root branch of the fine splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingTrace {
    pub steps: Vec<SplitStep>,
    pub terminal: Terminal,
    pub factorization: Option<Factorization>,
    /// `ψ^(l)` (relative to the input coordinates) at the terminal level.
    pub psi: RootJet,
}

impl SplittingTrace {
    pub fn multiplicities(&self) -> Vec<u32> {
        self.steps
            .iter()
            .filter(|s| s.case == StepCase::Case3Shear)
            .map(|s| s.multiplicity)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingForest {
    pub selection: LprSelection,
    pub branches: Vec<SplittingTrace>,
}

struct Ctx<'a> {
    phi: &'a PuiseuxPoly,
    above: Vec<Point>,
    h: Rational,
    budget: usize,
}

fn vertices_above_bisectrix(poly: &NewtonPolyhedron) -> Vec<Point> {
    poly.vertices().iter().filter(|v| v.t2 > v.t1).cloned().collect()
}

/// Fine splitting of the roots of `φ^a` over the principal domain.
/// `psi` is the jet with `φ^a(y) = φ(y1, y2 + ψ(y1))`.
pub fn fine_splitting_trace(phi_a: &PuiseuxPoly, psi: &RootJet, m: &Rational) -> Result<SplittingForest> {
    fine_splitting_trace_with_budget(phi_a, psi, m, DEFAULT_STEP_BUDGET)
}

pub fn fine_splitting_trace_with_budget(
    phi_a: &PuiseuxPoly,
    psi: &RootJet,
    m: &Rational,
    budget: usize,
) -> Result<SplittingForest> {
    let poly = NewtonPolyhedron::of(phi_a)?;
    let selection = select_l_pr_for(&poly, m)?;
    let phi = phi_a.shear(&(-&psi.to_poly()))?;
    let ctx = Ctx {
        phi: &phi,
        above: vertices_above_bisectrix(&poly),
        h: poly.distance(),
        budget,
    };
    let start = match selection.case {
        LprCase::A => Some(poly.edges()[selection.l_pr - 1].clone()),
        LprCase::B => Some(poly.edges()[selection.l_pr - 2].clone()),
        LprCase::C1 | LprCase::C2 => None,
    };
    let mut branches = Vec::new();
    match start {
        Some(edge) => explore(&ctx, phi_a.clone(), psi.clone(), edge, 1, Vec::new(), &mut branches)?,
        None => {
            let mult = int_u32(&poly.last().t2)?;
            branches.push(SplittingTrace {
                steps: Vec::new(),
                terminal: Terminal::Stop,
                factorization: Some(factor_out(&phi, psi, mult)?),
                psi: psi.clone(),
            });
        }
    }
    Ok(SplittingForest { selection, branches })
}

fn int_u32(q: &Rational) -> Result<u32> {
    use num_traits::ToPrimitive;
    if !q.is_integer() {
        return Err(Error::Internal(format!("non-integer x2 exponent {q}")));
    }
    q.to_integer()
        .to_u32()
        .ok_or_else(|| Error::Internal(format!("exponent {q} out of range")))
}

/// Exact division of `φ` by `(x2 − jet)^mult`.
fn factor_out(phi: &PuiseuxPoly, jet: &RootJet, mult: u32) -> Result<Factorization> {
    let divisor = (&PuiseuxPoly::x2() - &jet.to_poly()).pow(mult);
    let (q, r) = phi.div_rem_x2(&divisor)?;
    if !r.is_zero() {
        return Err(Error::Internal(format!("(x2 - ({jet}))^{mult} does not divide the input")));
    }
    Ok(Factorization {
        jet: jet.clone(),
        multiplicity: mult,
        cofactor: q,
    })
}

fn marker(level: usize, edge: &Edge, case: StepCase) -> SplitStep {
    SplitStep {
        level,
        weight: edge.weight.clone(),
        exponent: edge.a(),
        root: None,
        multiplicity: 0,
        case,
        vertex_after: None,
        above_bisectrix_preserved: None,
    }
}

fn explore(
    ctx: &Ctx<'_>,
    cur: PuiseuxPoly,
    jet: RootJet,
    edge: Edge,
    level: usize,
    mut steps: Vec<SplitStep>,
    out: &mut Vec<SplittingTrace>,
) -> Result<()> {
    if level > ctx.budget {
        out.push(SplittingTrace {
            steps,
            terminal: Terminal::BudgetExceeded,
            factorization: None,
            psi: jet,
        });
        return Ok(());
    }
    let w = &edge.weight;
    let a = edge.a();
    let part = kappa_principal_part(&cur, w)?;
    let u = part.restrict_x1_one();
    let mut multiple = Vec::new();
    for r in squarefree_real_roots(&u) {
        if r.multiplicity == 1 {
            steps.push(SplitStep {
                root: Some(r),
                multiplicity: 1,
                ..marker(level, &edge, StepCase::Case1NoRoot)
            });
        } else {
            multiple.push(r);
        }
    }
    let du = u.derivative();
    if !du.is_zero() {
        let (crit, _) = du.div_rem(&u.gcd(&du));
        if crit.degree().is_some_and(|d| d > 0) {
            for r in squarefree_real_roots(&crit) {
                steps.push(SplitStep {
                    root: Some(r),
                    multiplicity: 0,
                    ..marker(level, &edge, StepCase::Case2GradNonzero)
                });
            }
        }
    }
    if multiple.is_empty() {
        out.push(SplittingTrace {
            steps,
            terminal: Terminal::NoMultipleRoot,
            factorization: None,
            psi: jet,
        });
        return Ok(());
    }
    let prev_m = steps
        .iter()
        .rev()
        .find(|s| s.case == StepCase::Case3Shear)
        .map(|s| s.multiplicity);
    for r in multiple {
        let mut branch = steps.clone();
        let mult = r.multiplicity;
        if prev_m.is_some_and(|p| mult > p) {
            return Err(Error::Internal(format!("multiplicity increased to {mult} at level {level}")));
        }
        if level == 1 && int(mult as i64) > ctx.h {
            return Err(Error::Internal(format!("first multiplicity {mult} exceeds h = {}", ctx.h)));
        }
        let c0 = match &r.location {
            RootLocation::Exact(c) => c.clone(),
            RootLocation::Interval { lo, hi } => {
                branch.push(SplitStep {
                    root: Some(r.clone()),
                    multiplicity: mult,
                    ..marker(level, &edge, StepCase::Case3Shear)
                });
                out.push(SplittingTrace {
                    steps: branch,
                    terminal: Terminal::AlgebraicRootHalt(Box::new(AlgebraicRootReport {
                        context: format!("fine splitting level {level}"),
                        lo: lo.clone(),
                        hi: hi.clone(),
                        multiplicity: mult,
                        factor: r.factor.clone(),
                    })),
                    factorization: None,
                    psi: jet.clone(),
                });
                continue;
            }
        };
        let (next, next_jet) = if c0.is_zero() {
            (cur.clone(), jet.clone())
        } else {
            let mut j = jet.clone();
            j.push(c0.clone(), a.clone(), HalfPlane::Plus);
            (cur.shear(&PuiseuxPoly::monomial(c0.clone(), a.clone(), 0))?, j)
        };
        let next_poly = NewtonPolyhedron::of(&next)?;
        // The rightmost point on L^(l) moves to (A + a(B − M), M).
        let expected = Point::new(
            &edge.right.t1 + &a * (&edge.right.t2 - int(mult as i64)),
            int(mult as i64),
        );
        let on_line = next_poly
            .vertices()
            .iter()
            .filter(|v| w.eval(v).is_one())
            .max_by(|p, q| p.t1.cmp(&q.t1))
            .cloned();
        if !next_poly.is_supporting(w) || on_line.as_ref() != Some(&expected) {
            return Err(Error::Internal(format!(
                "vertex update at level {level}: expected {expected}, found {}",
                on_line.map_or("none".to_string(), |p| p.to_string())
            )));
        }
        let preserved = vertices_above_bisectrix(&next_poly) == ctx.above;
        branch.push(SplitStep {
            root: Some(r.clone()),
            multiplicity: mult,
            vertex_after: Some(expected.clone()),
            above_bisectrix_preserved: Some(preserved),
            ..marker(level, &edge, StepCase::Case3Shear)
        });
        if next.min_e2().unwrap_or(0) >= mult {
            branch.push(marker(level, &edge, StepCase::CaseAStop));
            let fact = factor_out(ctx.phi, &next_jet, mult)?;
            out.push(SplittingTrace {
                steps: branch,
                terminal: Terminal::Stop,
                factorization: Some(fact),
                psi: next_jet,
            });
            continue;
        }
        branch.push(marker(level, &edge, StepCase::CaseBContinue));
        let idx = next_poly
            .vertex_index(&expected)
            .ok_or_else(|| Error::Internal("updated vertex missing".into()))?;
        let next_edge = next_poly
            .edges()
            .get(idx)
            .cloned()
            .ok_or_else(|| Error::Internal("no edge below the updated vertex".into()))?;
        if next_edge.a() <= a {
            return Err(Error::Internal("edge exponents did not increase".into()));
        }
        explore(ctx, next, next_jet, next_edge, level + 1, branch, out)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionR {
    pub holds: bool,
    pub cofactor: PuiseuxPoly,
}

/// Checks `φ^f = y2^B · φ̃` for the maximal `B` with `𝒩(φ^f) ⊂ {t2 ≥ B}`.
pub fn condition_r_check(phi: &PuiseuxPoly, f: &RootJet, b: u32) -> Result<ConditionR> {
    let phif = phi.shear(&f.to_poly())?;
    let max_b = phif
        .min_e2()
        .ok_or_else(|| Error::Precondition("zero polynomial".into()))?;
    if max_b != b {
        return Err(Error::Precondition(format!("B = {b} is not maximal (maximal is {max_b})")));
    }
    match phif.divide_x2_power(b) {
        Some(cofactor) => Ok(ConditionR { holds: true, cofactor }),
        None => Err(Error::Internal("x2-power division failed despite support bound".into())),
    }
}
