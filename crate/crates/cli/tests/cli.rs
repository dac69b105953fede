use std::path::Path;
use std::process::{Command, Output};

use lnsurrogate::dists::{AlphaMuParams, Fading, LognormalParams};
use lnsurrogate::mapping::forward_nakagami;
use lnsurrogate::oracle::{quad_expectation, Domain};
use lnsurrogate::products::Surrogate;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_lnsurrogate");
const DOCS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs");
const REFERENCE_FILE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference-cascade.json");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("LNSURROGATE_TOL").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let s: Value = serde_json::from_str(&std::fs::read_to_string(Path::new(DOCS).join(name)).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value) {
    let errs: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errs.is_empty(), "{errs:#?}");
}

/// `(header, rows)` of a CSV artifact, plus its metadata lines.
fn csv(text: &str) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let meta: Vec<String> = text.lines().filter(|l| l.starts_with("# ")).map(str::to_string).collect();
    let mut body = text.lines().filter(|l| !l.starts_with('#'));
    let header = body.next().unwrap().split(',').map(str::to_string).collect();
    let rows = body.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (meta, header, rows)
}

fn col(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn map_forward_json_round_trips_table_one() {
    let v = schema("table.schema.json");
    let rows = [(0.5, 0.5, 5, 5.48, 4.35, 4.65), (-1.0, 1.0, 10, 2.97, 0.80, 1.39)];
    for (nu, s, n, m, ox, oy) in rows {
        let out = stdout(&["map-forward", "--nu", &nu.to_string(), "--sigma", &s.to_string(), "--n-factors", &n.to_string(), "--format", "json"]);
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_valid(&v, &doc);
        let r = doc["rows"].as_array().unwrap();
        assert_eq!(r[0][0], "nakagami");
        assert!((r[0][2].as_f64().unwrap() - m).abs() <= 0.01);
        assert!((r[0][3].as_f64().unwrap() - ox).abs() <= 0.01);
        assert!((r[1][3].as_f64().unwrap() - oy).abs() <= 0.01);
        assert_eq!(doc["metadata"]["eta_mu_format"], "format1");
    }
}

#[test]
fn csv_cells_carry_full_precision() {
    let out = stdout(&["map-forward", "--nu", "-1", "--sigma", "1", "--n-factors", "5", "--family", "nak"]);
    let (meta, header, rows) = csv(&out);
    for key in ["version", "seed", "forward_tol", "eta_mu_format"] {
        assert!(meta.iter().any(|l| l.starts_with(&format!("# {key}: "))), "{key} missing from {meta:?}");
    }
    let lib = forward_nakagami(&LognormalParams::new(-1.0, 1.0).unwrap(), 5).unwrap();
    assert_eq!(col(&header, &rows, "m")[0], lib.m);
    assert_eq!(col(&header, &rows, "omega")[0], lib.omega());
}

#[test]
fn exit_codes() {
    // infeasible I-Nakagami product
    let o = run(&["map-forward", "--nu", "0", "--sigma", "2", "--n-factors", "3", "--family", "inv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N ≥ 10"));
    assert_eq!(run(&["map-forward", "--nu", "0"]).status.code(), Some(1));
    assert_eq!(run(&["map-forward", "--nu", "0", "--sigma", "-1", "--n-factors", "3"]).status.code(), Some(1));
    assert_eq!(run(&["validate", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "pdf", "--nu", "0", "--sigma", "1", "--grid", "log:0:1:5"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "composite-pdf", "--nu", "0", "--sigma", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    assert_eq!(run(&["map-reverse", empty.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["map-reverse", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn tolerance_from_environment() {
    // the inverse solution of this target carries a residual of one ulp
    let args = ["map-forward", "--nu", "-1", "--sigma", "1", "--n-factors", "5"];
    let o = Command::new(BIN).args(args).env("LNSURROGATE_TOL", "1e-300").output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(BIN).args(args).env("LNSURROGATE_TOL", "1e-6").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("# forward_tol: 1e-6"));
    let o = Command::new(BIN).args(args).env("LNSURROGATE_TOL", "abc").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn map_reverse_table_two_file() {
    let v = schema("cascade.schema.json");
    let file: Value = serde_json::from_str(&std::fs::read_to_string(REFERENCE_FILE).unwrap()).unwrap();
    assert_valid(&v, &file);
    let (meta, header, rows) = csv(&stdout(&["map-reverse", REFERENCE_FILE]));
    assert!(meta.contains(&"# kappa_mu_order: 0.2".to_string()));
    let nu = col(&header, &rows, "nu");
    let s = col(&header, &rows, "sigma");
    let want = [(4.23, 0.67), (3.94, 0.56), (5.27, 0.60)];
    for i in 0..3 {
        assert!((nu[i] - want[i].0).abs() <= 0.01 && (s[i] - want[i].1).abs() <= 0.01, "{i}: {} {}", nu[i], s[i]);
    }
    assert_eq!(rows[3][0], "total");
    assert!((nu[3] - nu[..3].iter().sum::<f64>()).abs() < 1e-12);
}

#[test]
fn map_reverse_single_hop_matches_log_moments() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("one.json");
    std::fs::write(&f, r#"[{"family": "alpha-mu", "alpha": 2.5, "mu": 1.7, "r_hat": 1.3}]"#).unwrap();
    let (_, header, rows) = csv(&stdout(&["map-reverse", f.to_str().unwrap()]));
    let h = AlphaMuParams::new(2.5, 1.7, 1.3).unwrap();
    let dom = Domain::LogRange(-40.0, 10.0);
    let m = quad_expectation(|r| h.pdf(r), |r| r.ln(), dom).unwrap().value;
    let v = quad_expectation(|r| h.pdf(r), |r| (r.ln() - m).powi(2), dom).unwrap().value;
    assert!((col(&header, &rows, "nu")[0] - m).abs() < 1e-8);
    assert!((col(&header, &rows, "sigma2")[0] - v).abs() < 1e-8);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"[{"family": "alpha-mu", "alpha": 2.5, "mu": 1.7}]"#).unwrap();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&bad).unwrap()).unwrap();
    assert!(!schema("cascade.schema.json").is_valid(&doc));
    assert_eq!(run(&["map-reverse", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn eval_figure_one_mixture_data() {
    let out = stdout(&["eval", "pdf", "--model", "mixture", "--nu", "0.5", "--sigma", "0.5", "--n-factors", "5", "--p-mix", "0.5", "--grid", "log:0.2:8:40"]);
    let (meta, header, rows) = csv(&out);
    assert_eq!(header, ["r", "lognormal", "nakagami", "inv_nakagami", "mixture"]);
    assert!(meta.contains(&"# p_mix: 0.5".to_string()));
    let r = col(&header, &rows, "r");
    let (ln, x, y, z) = (col(&header, &rows, "lognormal"), col(&header, &rows, "nakagami"), col(&header, &rows, "inv_nakagami"), col(&header, &rows, "mixture"));
    let target = LognormalParams::new(0.5, 0.5).unwrap();
    let lib = forward_nakagami(&target, 5).unwrap().nakagami_product().unwrap();
    for i in 0..r.len() {
        assert!((z[i] - 0.5 * (x[i] + y[i])).abs() < 1e-15);
        assert_eq!(ln[i], target.pdf(r[i]).unwrap());
        assert_eq!(x[i], lib.pdf(r[i]).unwrap());
    }
}

#[test]
fn eval_pdf_integrates_to_one() {
    for model in ["nak", "inv", "mixture"] {
        let (_, header, rows) = csv(&stdout(&["eval", "pdf", "--model", model, "--nu", "-1", "--sigma", "1", "--n-factors", "10", "--grid", &format!("log:{}:{}:2001", (-9f64).exp(), 7f64.exp())]));
        let r = col(&header, &rows, "r");
        let last = header.last().unwrap().clone();
        let p = col(&header, &rows, &last);
        // trapezoid in ln r
        let total: f64 = (1..r.len()).map(|i| 0.5 * (p[i] * r[i] + p[i - 1] * r[i - 1]) * (r[i].ln() - r[i - 1].ln())).sum();
        assert!((total - 1.0).abs() < 1e-4, "{model}: {total}");
    }
}

#[test]
fn eval_cf_at_zero_is_one() {
    let (_, header, rows) = csv(&stdout(&["eval", "cf", "--nu", "0.5", "--sigma", "0.5", "--grid", "lin:0:5:11"]));
    for name in ["lognormal", "nakagami", "inv_nakagami", "mixture"] {
        let re = col(&header, &rows, &format!("{name}_re"));
        let im = col(&header, &rows, &format!("{name}_im"));
        assert!((re[0] - 1.0).abs() < 1e-9 && im[0].abs() < 1e-12, "{name}: {} {}", re[0], im[0]);
        assert!(re.iter().zip(&im).all(|(a, b)| a.hypot(*b) <= 1.0 + 1e-9));
    }
}

/// `E[P(γ̄ e^{2(ν+σz)} / E[R²])]` over a standard normal `z`.
fn lognormal_dbpsk_ber(nu: f64, s: f64, gb: f64) -> f64 {
    let power = (2.0 * nu + 2.0 * s * s).exp();
    let f = |z: f64| {
        let g = gb * (2.0 * (nu + s * z)).exp() / power;
        0.5 * (-g).exp() * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
    };
    lnsurrogate::quad::integrate(f, -12.0, 12.0, &lnsurrogate::quad::QuadConfig::with_tol(1e-12)).unwrap().value
}

#[test]
fn eval_ber_in_decibels() {
    let ber = |n: &str| {
        let (meta, header, rows) = csv(&stdout(&["eval", "ber", "--model", "nak", "--nu", "-1", "--sigma", "1", "--n-factors", n, "--grid", "db:0:20:3"]));
        assert!(meta.contains(&"# lognormal_method: quadrature".to_string()));
        assert_eq!(col(&header, &rows, "gamma_bar_db"), vec![0.0, 10.0, 20.0]);
        (col(&header, &rows, "lognormal"), col(&header, &rows, "nakagami"))
    };
    let (ln, x10) = ber("10");
    let (_, x20) = ber("20");
    for (i, gb) in [1.0, 10.0, 100.0].into_iter().enumerate() {
        let want = lognormal_dbpsk_ber(-1.0, 1.0, gb);
        assert!(((ln[i] - want) / want).abs() < 1e-7, "{} vs {want}", ln[i]);
        assert!((x20[i] - ln[i]).abs() < (x10[i] - ln[i]).abs());
    }
    assert!(x10.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn eval_composite_columns() {
    let (_, header, rows) = csv(&stdout(&["eval", "composite-cdf", "--model", "inv", "--nu", "0.5", "--sigma", "0.5", "--alpha", "2", "--mu", "2", "--grid", "lin:0.5:3:6"]));
    let r = col(&header, &rows, "r");
    let ln = col(&header, &rows, "lognormal");
    let y = col(&header, &rows, "inv_nakagami");
    assert!(y.windows(2).all(|w| w[1] > w[0]));
    // α = 2, μ = 2 is Nakagami with m = 2 and power δ r̂², so P(2, x) = 1 - e^{-x}(1 + x)
    for (i, &ri) in r.iter().enumerate() {
        let f = |z: f64| {
            let delta = (0.5 + 0.5 * z).exp();
            let x = 2.0 * ri * ri / delta;
            (1.0 - (-x).exp() * (1.0 + x)) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
        };
        let want = lnsurrogate::quad::integrate(f, -12.0, 12.0, &lnsurrogate::quad::QuadConfig::with_tol(1e-12)).unwrap().value;
        assert!((ln[i] - want).abs() < 1e-8, "{} vs {want}", ln[i]);
    }
}

#[test]
fn validate_report_is_deterministic_and_schema_valid() {
    let v = schema("validation-report.schema.json");
    for scenario in ["reverse-map", "metrics"] {
        let a = stdout(&["validate", scenario]);
        let b = stdout(&["validate", scenario]);
        assert_eq!(a, b);
        let doc: Value = serde_json::from_str(&a).unwrap();
        assert_valid(&v, &doc);
        assert_eq!(doc["passed"], true);
    }
    let t: Value = serde_json::from_str(&stdout(&["validate", "forward-map", "--timings"])).unwrap();
    assert_valid(&v, &t);
    assert!(t["scenarios"][0]["elapsed_s"].is_number());
    let c = stdout(&["validate", "forward-map", "--format", "csv"]);
    assert!(c.lines().any(|l| l.starts_with("scenario,label,value")));
}
