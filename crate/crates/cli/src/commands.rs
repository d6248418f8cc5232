use num_traits::ToPrimitive;
use rheight::adaptedness::{classify_singularity, is_adapted, AdaptednessVerdict, SingularityClass};
use rheight::exponents::{critical_exponent_with_budget, report_knapp_certificates, ExponentReport, KnappCertificate};
use rheight::newton::{taylor_support, NewtonPolyhedron};
use rheight::numerics::{
    airy_scaling_check, surface_decay_fit, van_der_corput_fit, AiryRegime, Cutoff, DecayFit, LambdaGrid, RealPoly,
};
use rheight::varchenko::{fine_splitting_trace_with_budget, SplittingForest, Terminal, DEFAULT_STEP_BUDGET};
use rheight::{int, Error, PuiseuxPoly};
use serde::Serialize;
use thiserror::Error;

use crate::parse::{parse_expression, InputExpr, ParseError};
use crate::report::{
    q, ErrorBody, ErrorDocument, ForestDoc, HaltDoc, InputDoc, KnappDoc, ReportDocument, ReportParts,
    ToolDoc, SCHEMA_VERSION,
};
use crate::svg::{loglog_plot, newton_diagram, DiagramSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ALGEBRAIC_HALT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Debug)]
pub struct Options {
    pub max_steps: usize,
    pub series_order: Option<usize>,
    pub grid: LambdaGrid,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_steps: DEFAULT_STEP_BUDGET, series_order: None, grid: LambdaGrid::default() }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", .err.render(.text))]
    Parse { text: String, err: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(Error::AlgebraicRoot(_)) => EXIT_ALGEBRAIC_HALT,
            CliError::Core(e) if e.is_internal() => EXIT_INTERNAL,
            CliError::Core(_) => EXIT_USAGE,
        }
    }

    pub fn document(&self) -> ErrorDocument {
        let (kind, offset, halt) = match self {
            CliError::Parse { err, .. } => ("parse", Some(err.offset), None),
            CliError::Usage(_) => ("usage", None, None),
            CliError::Core(Error::AlgebraicRoot(r)) => ("algebraic_root_halt", None, Some(HaltDoc::new(r))),
            CliError::Core(e) if e.is_internal() => ("internal", None, None),
            CliError::Core(_) => ("precondition", None, None),
        };
        let message = match self {
            CliError::Parse { err, .. } => err.to_string(),
            other => other.to_string(),
        };
        ErrorDocument::new(ErrorBody { kind, message, offset, halt })
    }
}

pub fn parse_input(text: &str) -> Result<InputExpr, CliError> {
    parse_expression(text).map_err(|err| CliError::Parse { text: text.to_string(), err })
}

/// Everything `analyze` reports, before serialization.
pub struct Analysis {
    pub input: InputExpr,
    pub verdict: AdaptednessVerdict,
    pub polyhedron: NewtonPolyhedron,
    pub report: ExponentReport,
    pub class: Option<SingularityClass>,
    pub adapted_polyhedron: Option<NewtonPolyhedron>,
    pub forest: Option<SplittingForest>,
    pub certificates: Vec<KnappCertificate>,
}

impl Analysis {
    pub fn halted(&self) -> bool {
        self.forest
            .as_ref()
            .is_some_and(|f| f.branches.iter().any(|b| matches!(b.terminal, Terminal::AlgebraicRootHalt(_))))
    }

    pub fn document(&self) -> ReportDocument {
        ReportDocument::new(ReportParts {
            input: &self.input,
            verdict: &self.verdict,
            polyhedron: &self.polyhedron,
            report: &self.report,
            class: self.class.as_ref(),
            adapted_polyhedron: self.adapted_polyhedron.as_ref(),
            forest: self.forest.as_ref(),
            certificates: &self.certificates,
        })
    }
}

pub fn analyze(input: &InputExpr, opts: &Options) -> Result<Analysis, Error> {
    let phi = &input.poly;
    let verdict = is_adapted(phi)?;
    let polyhedron = NewtonPolyhedron::of(phi)?;
    let report = critical_exponent_with_budget(phi, opts.max_steps)?;
    let class = if !report.linear.adapted_linear_exists && report.h_lin < int(2) {
        Some(classify_singularity(phi, opts.series_order)?)
    } else {
        None
    };
    let (adapted_polyhedron, forest) = match (&report.adapted, &report.m) {
        (Some(ac), Some(m)) => (
            Some(NewtonPolyhedron::of(&ac.phi_a)?),
            Some(fine_splitting_trace_with_budget(&ac.phi_a, &ac.psi, m, opts.max_steps)?),
        ),
        _ => (None, None),
    };
    let certificates = report_knapp_certificates(&report)?;
    Ok(Analysis {
        input: input.clone(),
        verdict,
        polyhedron,
        report,
        class,
        adapted_polyhedron,
        forest,
        certificates,
    })
}

/// Rendered command output and the exit code it implies.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub json: Option<String>,
    pub svg: Option<String>,
    pub code: i32,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

pub fn cmd_analyze(input: &InputExpr, opts: &Options) -> Result<Output, CliError> {
    let a = analyze(input, opts)?;
    let code = if a.halted() { EXIT_ALGEBRAIC_HALT } else { EXIT_OK };
    Ok(Output { json: Some(to_json(&a.document())), svg: None, code })
}

#[derive(Clone, Debug, Serialize)]
pub struct KnappDocument {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool: ToolDoc,
    pub input: InputDoc,
    pub p_c_prime: String,
    pub phi_linear: String,
    pub knapp: KnappDoc,
}

pub fn cmd_knapp(input: &InputExpr, opts: &Options) -> Result<Output, CliError> {
    let report = critical_exponent_with_budget(&input.poly, opts.max_steps)?;
    let certs = report_knapp_certificates(&report)?;
    let doc = KnappDocument {
        schema: "rheight/knapp",
        schema_version: SCHEMA_VERSION,
        tool: ToolDoc::current(),
        input: InputDoc::new(input),
        p_c_prime: q(&report.p_c_prime),
        phi_linear: report.linear.phi_linear.to_string(),
        knapp: KnappDoc::new(&certs, &report.p_c_prime),
    };
    Ok(Output { json: Some(to_json(&doc)), svg: None, code: EXIT_OK })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceDocument {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool: ToolDoc,
    pub input: InputDoc,
    pub phi_linear: String,
    /// `null` when the linear coordinates are already adapted.
    pub forest: Option<ForestDoc>,
}

pub fn cmd_trace(input: &InputExpr, opts: &Options) -> Result<Output, CliError> {
    let report = critical_exponent_with_budget(&input.poly, opts.max_steps)?;
    let mut code = EXIT_OK;
    let forest = match (&report.adapted, &report.m) {
        (Some(ac), Some(m)) => {
            let f = fine_splitting_trace_with_budget(&ac.phi_a, &ac.psi, m, opts.max_steps)?;
            if f.branches.iter().any(|b| matches!(b.terminal, Terminal::AlgebraicRootHalt(_))) {
                code = EXIT_ALGEBRAIC_HALT;
            }
            Some(ForestDoc::new(&f, ac, m))
        }
        _ => None,
    };
    let doc = TraceDocument {
        schema: "rheight/trace",
        schema_version: SCHEMA_VERSION,
        tool: ToolDoc::current(),
        input: InputDoc::new(input),
        phi_linear: report.linear.phi_linear.to_string(),
        forest,
    };
    Ok(Output { json: Some(to_json(&doc)), svg: None, code })
}

/// Newton diagram of `φ^a` with `L⁺`, `Δ^(m)` and the r-height crossing when the
/// input is not linearly adapted; otherwise of `φ` in linearly adapted coordinates.
/// Fractional inputs get their plain Newton–Puiseux diagram.
pub fn diagram_svg(input: &InputExpr, opts: &Options) -> Result<String, CliError> {
    if !input.poly.is_polynomial() {
        return Ok(plain_diagram(&input.poly, format!("N({})", input.poly))?);
    }
    let report = critical_exponent_with_budget(&input.poly, opts.max_steps)?;
    match (&report.adapted, &report.r_height) {
        (Some(ac), Some(rh)) => {
            let support = taylor_support(&ac.phi_a).map_err(Error::from)?;
            let poly = NewtonPolyhedron::of(&ac.phi_a).map_err(Error::from)?;
            let title = format!("N^r(phi^a), phi^a = {}, h_r = {}, m = {}", ac.phi_a, rh.value, rh.m);
            let (svg, _) = newton_diagram(&DiagramSpec { title, support: &support, polyhedron: &poly, r_height: Some(rh) });
            Ok(svg)
        }
        _ => Ok(plain_diagram(
            &report.linear.phi_linear,
            format!("N({}), h = {}", report.linear.phi_linear, report.h),
        )?),
    }
}

fn plain_diagram(phi: &PuiseuxPoly, title: String) -> Result<String, Error> {
    let support = taylor_support(phi)?;
    let poly = NewtonPolyhedron::of(phi)?;
    Ok(newton_diagram(&DiagramSpec { title, support: &support, polyhedron: &poly, r_height: None }).0)
}

pub fn cmd_diagram(input: &InputExpr, opts: &Options) -> Result<Output, CliError> {
    Ok(Output { json: None, svg: Some(diagram_svg(input, opts)?), code: EXIT_OK })
}

#[derive(Clone, Debug, Serialize)]
pub struct AiryMeta {
    pub u: f64,
    pub b: f64,
    pub regime: AiryRegime,
    pub scaled_range: (f64, f64),
    pub prefactor_ratio: Option<f64>,
}

/// One JSON line of `decay` output.
#[derive(Clone, Debug, Serialize)]
pub struct DecayRecord {
    pub schema: &'static str,
    pub schema_version: u32,
    pub record: &'static str,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub airy: Option<AiryMeta>,
    pub fit: DecayFit,
}

impl DecayRecord {
    fn new(record: &'static str, label: String, fit: DecayFit) -> Self {
        DecayRecord { schema: "rheight/decay", schema_version: SCHEMA_VERSION, record, label, airy: None, fit }
    }
}

/// Surface phases with their expected `λ^{−1/h}` decay.
pub fn surface_catalogue() -> Vec<(&'static str, PuiseuxPoly)> {
    let p = |t: &[(i64, u32, u32)]| PuiseuxPoly::from_int_terms(t);
    let parabola = p(&[(1, 0, 1), (-1, 2, 0)]);
    vec![
        ("(x2 - x1^2)^2", parabola.pow(2)),
        ("(x2 - x1^2)^5", parabola.pow(5)),
        ("x1^2 + x2^2", p(&[(1, 2, 0), (1, 0, 2)])),
    ]
}

pub const VDC_ORDERS: [u32; 3] = [2, 3, 5];
/// `(u, b)` for the cubic phase `b t³ − u t`.
pub const AIRY_CASES: [(f64, f64); 3] = [(0.0, 1.0), (0.5, 1.0), (-0.5, 1.0)];

pub fn surface_record(label: &str, phi: &PuiseuxPoly, grid: &LambdaGrid) -> Result<DecayRecord, Error> {
    let fit = surface_decay_fit(phi, [0.0, 0.0, 1.0], Cutoff::default(), grid)?;
    Ok(DecayRecord::new("surface", label.to_string(), fit))
}

pub fn vdc_record(m: u32, grid: &LambdaGrid) -> Result<DecayRecord, Error> {
    let f = RealPoly::monomial(m as usize);
    let fit = van_der_corput_fit(m, &f, &|_| 1.0, (0.0, 1.0), grid)?;
    Ok(DecayRecord::new("van_der_corput", format!("s^{m} on [0, 1]"), fit))
}

pub fn airy_record(u: f64, b: f64, grid: &LambdaGrid) -> Result<DecayRecord, Error> {
    let c = airy_scaling_check(u, b, grid)?;
    let lin = if u == 0.0 {
        String::new()
    } else if u > 0.0 {
        format!(" - {u}*t")
    } else {
        format!(" + {}*t", -u)
    };
    let mut r = DecayRecord::new("airy", format!("{b}*t^3{lin}"), c.fit);
    r.airy = Some(AiryMeta {
        u: c.u,
        b: c.b,
        regime: c.regime,
        scaled_range: c.scaled_range,
        prefactor_ratio: c.prefactor_ratio,
    });
    Ok(r)
}

pub fn decay_catalogue(grid: &LambdaGrid) -> Result<Vec<DecayRecord>, Error> {
    let mut out = Vec::new();
    for (label, phi) in surface_catalogue() {
        out.push(surface_record(label, &phi, grid)?);
    }
    for m in VDC_ORDERS {
        out.push(vdc_record(m, grid)?);
    }
    for (u, b) in AIRY_CASES {
        out.push(airy_record(u, b, grid)?);
    }
    Ok(out)
}

/// `decay catalogue` or `decay <expr>`: JSON lines plus a log-log plot.
pub fn cmd_decay(arg: &str, opts: &Options) -> Result<Output, CliError> {
    let records = if matches!(arg.trim(), "catalogue" | "catalog") {
        decay_catalogue(&opts.grid)?
    } else {
        let input = parse_input(arg)?;
        if opts.grid.decades() < 1.0 {
            return Err(CliError::Usage("the lambda range must span at least one decade".into()));
        }
        vec![surface_record(arg.trim(), &input.poly, &opts.grid)?]
    };
    let mut json = String::new();
    for r in &records {
        json.push_str(&serde_json::to_string(r).expect("records serialize"));
        json.push('\n');
    }
    let plotted: Vec<(String, &DecayFit)> = records.iter().map(|r| (r.label.clone(), &r.fit)).collect();
    Ok(Output { json: Some(json), svg: Some(loglog_plot(&plotted)), code: EXIT_OK })
}

/// Thread count from `RHEIGHT_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(crate::THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .and_then(|n| n.to_usize())
        .filter(|n| *n > 0)
}
