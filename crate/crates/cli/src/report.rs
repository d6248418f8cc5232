//! JSON documents. Exact values are `"p/q"` strings; key order follows field order.

use rheight::adaptedness::{AdaptednessVerdict, Criterion, Family, LinearHeightReport, SingularityClass};
use rheight::exponents::{max_knapp_exponent, normal_form_theta, ExponentReport, ExponentSource, KnappCertificate};
use rheight::newton::{Edge, Face, NewtonPolyhedron, Point, RHeight, Ray, Weight};
use rheight::varchenko::{
    AdaptedCoordinates, Factorization, LprCase, LprSelection, SplitStep, SplittingForest, SplittingTrace, StepCase,
    Terminal,
};
use rheight::{AlgebraicRootReport, HalfPlane, LinearMap, Rational, RootLocation, RootRecord};
use serde::Serialize;

use crate::parse::InputExpr;

pub const SCHEMA_VERSION: u32 = 1;

pub fn q(r: &Rational) -> String {
    r.to_string()
}

fn pair(a: &Rational, b: &Rational) -> [String; 2] {
    [q(a), q(b)]
}

fn point(p: &Point) -> [String; 2] {
    pair(&p.t1, &p.t2)
}

fn weight(w: &Weight) -> [String; 2] {
    pair(&w.k1, &w.k2)
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolDoc {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolDoc {
    pub fn current() -> Self {
        ToolDoc { name: "rheight", version: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDoc {
    pub source: String,
    pub canonical: String,
    pub variables: Vec<String>,
    pub ramification: String,
}

impl InputDoc {
    pub fn new(input: &InputExpr) -> Self {
        InputDoc {
            source: input.source.clone(),
            canonical: input.poly.to_string(),
            variables: input.variables.clone(),
            ramification: input.poly.ramification().to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeDoc {
    pub left: [String; 2],
    pub right: [String; 2],
    /// `(κ1, κ2)`.
    pub weight: [String; 2],
    pub a: String,
}

impl EdgeDoc {
    fn new(e: &Edge) -> Self {
        EdgeDoc { left: point(&e.left), right: point(&e.right), weight: weight(&e.weight), a: q(&e.a()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceDoc {
    pub kind: &'static str,
    /// 1-based edge index for compact edges.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray: Option<Ray>,
}

impl FaceDoc {
    pub fn new(f: &Face) -> Self {
        match f {
            Face::Vertex { point: p, .. } => FaceDoc { kind: f.kind(), edge: None, vertex: Some(point(p)), ray: None },
            Face::CompactEdge { index, .. } => FaceDoc { kind: f.kind(), edge: Some(index + 1), vertex: None, ray: None },
            Face::Unbounded { ray, point: p, .. } => {
                FaceDoc { kind: f.kind(), edge: None, vertex: Some(point(p)), ray: Some(*ray) }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyhedronDoc {
    pub vertices: Vec<[String; 2]>,
    pub edges: Vec<EdgeDoc>,
    pub distance: String,
    pub principal_face: FaceDoc,
}

impl PolyhedronDoc {
    pub fn new(p: &NewtonPolyhedron) -> Self {
        PolyhedronDoc {
            vertices: p.vertices().iter().map(point).collect(),
            edges: p.edges().iter().map(EdgeDoc::new).collect(),
            distance: q(&p.distance()),
            principal_face: FaceDoc::new(&p.principal_face()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RootDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[String; 2]>,
    pub multiplicity: u32,
    pub half_plane: HalfPlane,
    pub factor: String,
}

impl RootDoc {
    pub fn new(r: &RootRecord) -> Self {
        let (value, interval) = match &r.location {
            RootLocation::Exact(v) => (Some(q(v)), None),
            RootLocation::Interval { lo, hi } => (None, Some(pair(lo, hi))),
        };
        RootDoc { value, interval, multiplicity: r.multiplicity, half_plane: r.half_plane, factor: r.factor.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdaptednessDoc {
    pub adapted: bool,
    pub criterion: Criterion,
    pub m_pr: Option<u32>,
    pub d: String,
    pub non_integer_ratio: bool,
    pub witness: Option<RootDoc>,
}

impl AdaptednessDoc {
    pub fn new(v: &AdaptednessVerdict) -> Self {
        AdaptednessDoc {
            adapted: v.adapted,
            criterion: v.criterion,
            m_pr: v.m_pr,
            d: q(&v.d),
            non_integer_ratio: v.non_integer_ratio,
            witness: v.witness.as_ref().map(RootDoc::new),
        }
    }
}

fn matrix(t: &LinearMap) -> [[String; 2]; 2] {
    [[q(&t.a), q(&t.b)], [q(&t.c), q(&t.d)]]
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearDoc {
    pub h_lin: String,
    /// `x = T y`, rows `[[a, b], [c, d]]`.
    pub transform: [[String; 2]; 2],
    pub adapted_linear_exists: bool,
    pub m: Option<String>,
    pub phi_linear: String,
}

impl LinearDoc {
    fn new(l: &LinearHeightReport) -> Self {
        LinearDoc {
            h_lin: q(&l.h_lin),
            transform: matrix(&l.transform),
            adapted_linear_exists: l.adapted_linear_exists,
            m: l.m.as_ref().map(q),
            phi_linear: l.phi_linear.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassDoc {
    pub family: Family,
    /// `A_{n−1}` / `D_{n+1}`; `null` for `n = ∞`.
    pub index: Option<u32>,
    pub name: String,
    pub m: u32,
    pub n: Option<u32>,
    pub psi_truncation: String,
    pub psi_exact: bool,
    pub certified_order: Option<u32>,
    pub transform: [[String; 2]; 2],
    pub d: String,
    pub theta: String,
}

impl ClassDoc {
    pub fn new(c: &SingularityClass) -> Self {
        let fam = match c.family {
            Family::A => "A",
            Family::D => "D",
        };
        let sub = c.index.map_or_else(|| "inf".to_string(), |i| i.to_string());
        ClassDoc {
            family: c.family,
            index: c.index,
            name: format!("{fam}_{sub}"),
            m: c.m,
            n: c.n,
            psi_truncation: c.psi_truncation.to_string(),
            psi_exact: c.psi_exact,
            certified_order: (c.certified_order != u32::MAX).then_some(c.certified_order),
            transform: matrix(&c.transform),
            d: q(&c.d),
            theta: q(&normal_form_theta(c)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShearStepDoc {
    pub weight: [String; 2],
    pub exponent: String,
    pub coeff: String,
    pub multiplicity: u32,
    pub d_before: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdaptedDoc {
    pub psi: String,
    pub phi_a: String,
    pub h: String,
    pub principal_line: Option<[String; 2]>,
    pub steps: Vec<ShearStepDoc>,
    pub polyhedron: PolyhedronDoc,
}

impl AdaptedDoc {
    pub fn new(ac: &AdaptedCoordinates, poly: &NewtonPolyhedron) -> Self {
        AdaptedDoc {
            psi: ac.psi.to_string(),
            phi_a: ac.phi_a.to_string(),
            h: q(&ac.h),
            principal_line: ac.principal_line.as_ref().map(weight),
            steps: ac
                .steps
                .iter()
                .map(|s| ShearStepDoc {
                    weight: weight(&s.weight),
                    exponent: q(&s.exponent),
                    coeff: q(&s.coeff),
                    multiplicity: s.multiplicity,
                    d_before: q(&s.d_before),
                })
                .collect(),
            polyhedron: PolyhedronDoc::new(poly),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeHeightDoc {
    pub edge: usize,
    pub h_l: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RHeightDoc {
    pub value: String,
    pub line: [String; 2],
    pub m: String,
    pub d_line: String,
    pub anchor: [String; 2],
    pub edge_heights: Vec<EdgeHeightDoc>,
    pub horizontal_height: String,
    /// `Δ^(m) ∩ ∂𝒩ʳ`, equal to `(hʳ − m, hʳ + 1)`.
    pub crossing: [String; 2],
}

impl RHeightDoc {
    pub fn new(r: &RHeight) -> Self {
        RHeightDoc {
            value: q(&r.value),
            line: weight(&r.line),
            m: q(&r.m),
            d_line: q(&r.d_line),
            anchor: point(&r.anchor),
            edge_heights: r
                .edge_heights
                .iter()
                .map(|(i, h)| EdgeHeightDoc { edge: i + 1, h_l: q(h) })
                .collect(),
            horizontal_height: q(&r.horizontal_height),
            crossing: point(&r.crossing),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LprDoc {
    pub case: LprCase,
    pub l_pr: usize,
    pub a: String,
    pub face: FaceDoc,
}

impl LprDoc {
    pub fn new(s: &LprSelection) -> Self {
        LprDoc { case: s.case, l_pr: s.l_pr, a: q(&s.a), face: FaceDoc::new(&s.face) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HaltDoc {
    pub context: String,
    pub interval: [String; 2],
    pub multiplicity: u32,
    pub factor: String,
}

impl HaltDoc {
    pub fn new(r: &AlgebraicRootReport) -> Self {
        HaltDoc {
            context: r.context.clone(),
            interval: pair(&r.lo, &r.hi),
            multiplicity: r.multiplicity,
            factor: r.factor.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationDoc {
    pub jet: String,
    pub multiplicity: u32,
    pub cofactor: String,
}

impl FactorizationDoc {
    fn new(f: &Factorization) -> Self {
        FactorizationDoc { jet: f.jet.to_string(), multiplicity: f.multiplicity, cofactor: f.cofactor.to_string() }
    }
}

fn halt_of(t: &Terminal) -> Option<HaltDoc> {
    match t {
        Terminal::AlgebraicRootHalt(r) => Some(HaltDoc::new(r)),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchSummaryDoc {
    pub terminal: &'static str,
    pub multiplicities: Vec<u32>,
    pub psi: String,
    pub factorization: Option<FactorizationDoc>,
    pub halt: Option<HaltDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplittingSummaryDoc {
    pub l_pr: LprDoc,
    pub branches: Vec<BranchSummaryDoc>,
}

impl SplittingSummaryDoc {
    pub fn new(f: &SplittingForest) -> Self {
        SplittingSummaryDoc {
            l_pr: LprDoc::new(&f.selection),
            branches: f
                .branches
                .iter()
                .map(|b| BranchSummaryDoc {
                    terminal: b.terminal.tag(),
                    multiplicities: b.multiplicities(),
                    psi: b.psi.to_string(),
                    factorization: b.factorization.as_ref().map(FactorizationDoc::new),
                    halt: halt_of(&b.terminal),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitStepDoc {
    pub level: usize,
    pub weight: [String; 2],
    pub exponent: String,
    pub root: Option<RootDoc>,
    pub multiplicity: u32,
    pub case: StepCase,
    pub vertex_after: Option<[String; 2]>,
    pub above_bisectrix_preserved: Option<bool>,
}

impl SplitStepDoc {
    fn new(s: &SplitStep) -> Self {
        SplitStepDoc {
            level: s.level,
            weight: weight(&s.weight),
            exponent: q(&s.exponent),
            root: s.root.as_ref().map(RootDoc::new),
            multiplicity: s.multiplicity,
            case: s.case,
            vertex_after: s.vertex_after.as_ref().map(point),
            above_bisectrix_preserved: s.above_bisectrix_preserved,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchDoc {
    pub steps: Vec<SplitStepDoc>,
    pub terminal: &'static str,
    pub halt: Option<HaltDoc>,
    pub psi: String,
    pub factorization: Option<FactorizationDoc>,
}

impl BranchDoc {
    fn new(b: &SplittingTrace) -> Self {
        BranchDoc {
            steps: b.steps.iter().map(SplitStepDoc::new).collect(),
            terminal: b.terminal.tag(),
            halt: halt_of(&b.terminal),
            psi: b.psi.to_string(),
            factorization: b.factorization.as_ref().map(FactorizationDoc::new),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ForestDoc {
    pub m: String,
    pub psi: String,
    pub phi_a: String,
    pub l_pr: LprDoc,
    pub branches: Vec<BranchDoc>,
}

impl ForestDoc {
    pub fn new(f: &SplittingForest, ac: &AdaptedCoordinates, m: &Rational) -> Self {
        ForestDoc {
            m: q(m),
            psi: ac.psi.to_string(),
            phi_a: ac.phi_a.to_string(),
            l_pr: LprDoc::new(&f.selection),
            branches: f.branches.iter().map(BranchDoc::new).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateDoc {
    pub target: String,
    pub shear: String,
    pub m0: String,
    /// Box `|y1| ≤ ε^{k1}, |y2| ≤ ε^{k2}`.
    pub weight: [String; 2],
    pub derived_exponent: String,
    pub enclosing: Option<[String; 2]>,
    pub horizontal_level: Option<u32>,
}

impl CertificateDoc {
    pub fn new(c: &KnappCertificate) -> Self {
        CertificateDoc {
            target: c.target.tag(),
            shear: c.shear.to_string(),
            m0: q(&c.m0),
            weight: weight(&c.weight),
            derived_exponent: q(&c.derived_exponent),
            enclosing: c.enclosing.as_ref().map(|(a, b)| pair(a, b)),
            horizontal_level: c.horizontal_level,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KnappDoc {
    pub certificates: Vec<CertificateDoc>,
    pub max_exponent: Option<String>,
    pub matches_p_c_prime: bool,
}

impl KnappDoc {
    pub fn new(certs: &[KnappCertificate], p: &Rational) -> Self {
        let max = max_knapp_exponent(certs);
        KnappDoc {
            certificates: certs.iter().map(CertificateDoc::new).collect(),
            matches_p_c_prime: max.as_ref() == Some(p),
            max_exponent: max.as_ref().map(q),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    AlgebraicRootHalt,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool: ToolDoc,
    pub input: InputDoc,
    pub status: Status,
    pub d: String,
    pub h: String,
    pub h_lin: String,
    pub h_r: Option<String>,
    pub m: Option<String>,
    pub p_c_prime: String,
    pub theta: String,
    /// The input coordinates are adapted.
    pub adapted: bool,
    pub exponent_source: ExponentSource,
    pub adaptedness: AdaptednessDoc,
    pub linear: LinearDoc,
    pub class: Option<ClassDoc>,
    pub psi: Option<String>,
    pub polyhedron: PolyhedronDoc,
    pub adapted_coordinates: Option<AdaptedDoc>,
    pub r_height: Option<RHeightDoc>,
    pub splitting: Option<SplittingSummaryDoc>,
    pub knapp: KnappDoc,
}

pub struct ReportParts<'a> {
    pub input: &'a InputExpr,
    pub verdict: &'a AdaptednessVerdict,
    pub polyhedron: &'a NewtonPolyhedron,
    pub report: &'a ExponentReport,
    pub class: Option<&'a SingularityClass>,
    pub adapted_polyhedron: Option<&'a NewtonPolyhedron>,
    pub forest: Option<&'a SplittingForest>,
    pub certificates: &'a [KnappCertificate],
}

impl ReportDocument {
    pub fn new(p: ReportParts<'_>) -> Self {
        let r = p.report;
        let halted = p
            .forest
            .is_some_and(|f| f.branches.iter().any(|b| matches!(b.terminal, Terminal::AlgebraicRootHalt(_))));
        ReportDocument {
            schema: "rheight/report",
            schema_version: SCHEMA_VERSION,
            tool: ToolDoc::current(),
            input: InputDoc::new(p.input),
            status: if halted { Status::AlgebraicRootHalt } else { Status::Ok },
            d: q(&r.d),
            h: q(&r.h),
            h_lin: q(&r.h_lin),
            h_r: r.h_r.as_ref().map(q),
            m: r.m.as_ref().map(q),
            p_c_prime: q(&r.p_c_prime),
            theta: q(&r.theta),
            adapted: p.verdict.adapted,
            exponent_source: r.source,
            adaptedness: AdaptednessDoc::new(p.verdict),
            linear: LinearDoc::new(&r.linear),
            class: p.class.map(ClassDoc::new),
            psi: r.adapted.as_ref().map(|a| a.psi.to_string()),
            polyhedron: PolyhedronDoc::new(p.polyhedron),
            adapted_coordinates: r.adapted.as_ref().zip(p.adapted_polyhedron).map(|(a, n)| AdaptedDoc::new(a, n)),
            r_height: r.r_height.as_ref().map(RHeightDoc::new),
            splitting: p.forest.map(SplittingSummaryDoc::new),
            knapp: KnappDoc::new(p.certificates, &r.p_c_prime),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halt: Option<HaltDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorDocument {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool: ToolDoc,
    pub error: ErrorBody,
}

impl ErrorDocument {
    pub fn new(error: ErrorBody) -> Self {
        ErrorDocument { schema: "rheight/error", schema_version: SCHEMA_VERSION, tool: ToolDoc::current(), error }
    }
}
