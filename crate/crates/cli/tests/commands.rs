use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use rheight::exponents::critical_exponent;
use rheight::newton::{taylor_support, NewtonPolyhedron};
use rheight_cli::commands::diagram_svg;
use rheight_cli::svg::{newton_diagram, DiagramSpec};
use rheight_cli::{parse_expression, Options};
use serde_json::Value;

const TWO_EDGE: &str = "(x2 - x1^2 - x1^3) * (x2 - x1^2 - x1^4)^3";
const HALTING: &str = "((x2 - x1^2)^2 - 2*x1^6)^2";

fn rheight(args: &[&str]) -> Output {
    rheight_env(args, &[])
}

fn rheight_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rheight"));
    cmd.args(args).env_remove("RHEIGHT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn validate(kind: &str, doc: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/rheight.schema.json");
    let mut schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let root = schema.as_object_mut().unwrap();
    root.remove("oneOf");
    root.insert("$ref".into(), Value::String(format!("#/$defs/{kind}")));
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{kind}: {errors:#?}");
}

#[test]
fn analyze_succeeds_and_matches_schema() {
    for e in [TWO_EDGE, "(x2 - x1^2)^5", "x1^2 + x2^2", "x1^2*x2^3 + x2^4"] {
        let out = rheight(&["analyze", e]);
        assert_eq!(code(&out), 0, "{e}");
        let doc = stdout_json(&out);
        assert_eq!(doc["schema"], "rheight/report");
        validate("report", &doc);
    }
}

#[test]
fn two_edge_report_values() {
    let doc = stdout_json(&rheight(&["analyze", TWO_EDGE]));
    let text = doc.to_string();
    for v in ["\"11/4\"", "\"13/5\""] {
        assert!(text.contains(v), "missing {v}");
    }
}

#[test]
fn knapp_and_trace_match_schema() {
    for e in [TWO_EDGE, "(x2 - x1^2)^5"] {
        let out = rheight(&["knapp", e]);
        assert_eq!(code(&out), 0);
        validate("knapp_document", &stdout_json(&out));
        let out = rheight(&["trace", e]);
        assert_eq!(code(&out), 0);
        validate("trace", &stdout_json(&out));
    }
}

#[test]
fn parse_error_reports_offset() {
    let out = rheight(&["analyze", "2x1"]);
    assert_eq!(code(&out), 1);
    let doc = stdout_json(&out);
    validate("error", &doc);
    assert_eq!(doc["error"]["kind"], "parse");
    assert_eq!(doc["error"]["offset"], 1);
}

#[test]
fn non_critical_origin_is_a_precondition_failure() {
    let out = rheight(&["analyze", "x1 + x2^2"]);
    assert_eq!(code(&out), 1);
    let doc = stdout_json(&out);
    validate("error", &doc);
    assert_eq!(doc["error"]["kind"], "precondition");
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = rheight(&["frobnicate", "x1^2"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn irrational_multiple_root_halts_with_code_2() {
    let out = rheight(&["trace", HALTING]);
    assert_eq!(code(&out), 2);
    let doc = stdout_json(&out);
    validate("trace", &doc);
    assert!(doc.to_string().contains("algebraic_root_halt"));
}

#[test]
fn exhausted_budget_is_internal() {
    let out = rheight(&["analyze", "--max-steps", "0", TWO_EDGE]);
    assert_eq!(code(&out), 3);
    validate("error", &stdout_json(&out));
}

#[test]
fn output_is_deterministic() {
    for sub in ["analyze", "knapp", "trace", "diagram"] {
        let a = rheight(&[sub, TWO_EDGE]);
        let b = rheight(&[sub, TWO_EDGE]);
        let one = rheight_env(&[sub, TWO_EDGE], &[("RHEIGHT_THREADS", "1")]);
        let four = rheight_env(&[sub, TWO_EDGE], &[("RHEIGHT_THREADS", "4")]);
        assert_eq!(a.stdout, b.stdout, "{sub}");
        assert_eq!(one.stdout, four.stdout, "{sub}");
        assert_eq!(a.stdout, one.stdout, "{sub}");
    }
}

#[test]
fn json_flag_and_commented_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("phi.txt");
    fs::write(&input, "# two edges\n(x2 - x1^2 - x1^3)\n  * (x2 - x1^2 - x1^4)^3 # cubed factor\n").unwrap();
    let json = dir.path().join("out.json");
    let out = rheight(&["analyze", input.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let mut from_file: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    validate("report", &from_file);
    let mut inline = stdout_json(&rheight(&["analyze", TWO_EDGE]));
    assert_eq!(from_file["input"]["canonical"], inline["input"]["canonical"]);
    from_file.as_object_mut().unwrap().remove("input");
    inline.as_object_mut().unwrap().remove("input");
    assert_eq!(from_file, inline);
}

#[test]
fn error_document_goes_to_json_path() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("err.json");
    let out = rheight(&["analyze", "x1 +", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    validate("error", &doc);
}

#[test]
fn decay_writes_lines_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fit.svg");
    let out = rheight(&["decay", "x1^2 + x2^2", "--points", "8", "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    let rec: Value = serde_json::from_str(lines[0]).unwrap();
    validate("decay", &rec);
    let beta = rec["fit"]["fitted_exponent"].as_f64().expect("fitted exponent");
    assert!((beta - 1.0).abs() < 0.1, "{beta}");
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

fn attr(tag: &str, name: &str) -> String {
    let key = format!("{name}=\"");
    let start = tag.find(&key).unwrap_or_else(|| panic!("{name} in {tag}")) + key.len();
    tag[start..].split('"').next().unwrap().to_string()
}

#[test]
fn diagram_marks_crossing_and_vertices() {
    let out = rheight(&["diagram", TWO_EDGE]);
    assert_eq!(code(&out), 0);
    let svg = String::from_utf8(out.stdout).unwrap();

    let input = parse_expression(TWO_EDGE).unwrap();
    assert_eq!(svg, diagram_svg(&input, &Options::default()).unwrap());

    let report = critical_exponent(&input.poly).unwrap();
    let ac = report.adapted.as_ref().unwrap();
    let rh = report.r_height.as_ref().unwrap();
    let support = taylor_support(&ac.phi_a).unwrap();
    let poly = NewtonPolyhedron::of(&ac.phi_a).unwrap();
    let spec = DiagramSpec { title: String::new(), support: &support, polyhedron: &poly, r_height: Some(rh) };
    let (_, frame) = newton_diagram(&spec);

    let crossing = svg.lines().find(|l| l.contains("class=\"crossing\"")).expect("crossing marker");
    assert_eq!(attr(crossing, "data-t1"), "3/4");
    assert_eq!(attr(crossing, "data-t2"), "15/4");
    let (cx, cy): (f64, f64) = (attr(crossing, "cx").parse().unwrap(), attr(crossing, "cy").parse().unwrap());
    assert!((cx - frame.x(0.75)).abs() < 1e-3 && (cy - frame.y(3.75)).abs() < 1e-3);
    let (t1, t2) = frame.to_exponent(cx, cy);
    assert!((t1 - 0.75).abs() < 1e-3 && (t2 - 3.75).abs() < 1e-3);

    let vertices: Vec<(String, String)> = svg
        .lines()
        .filter(|l| l.contains("class=\"vertex\""))
        .map(|l| (attr(l, "data-t1"), attr(l, "data-t2")))
        .collect();
    let expected: Vec<(String, String)> =
        [("0", "4"), ("3", "3"), ("15", "0")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(vertices, expected);
}
