use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regseq"))
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn sum_fast_matches_brute() {
    let rep = data("sumdigits.json");
    let fast = json_of(&run(&["sum", "--rep", &rep, "--N", "1048576", "--format", "json"]));
    assert_eq!(fast["X"], "10485760");
    assert_eq!(fast["exact"], true);
    let brute = json_of(&run(&["sum", "--rep", &rep, "--N", "1048576", "--brute", "--format", "json"]));
    assert_eq!(brute["X"], fast["X"]);
}

#[test]
fn eval_sum_of_digits() {
    let v = json_of(&run(&["eval", "--rep", "builtin:sum-of-digits", "--n", "1023", "--format", "json"]));
    assert_eq!(v["x"], "10");
}

#[test]
fn spectrum_of_esthetic_four() {
    let v = json_of(&run(&["spectrum", "--rep", &data("esthetic4.json"), "--format", "json"]));
    let eig = v["eigenvalues"].as_array().unwrap();
    let total: u64 = eig.iter().map(|e| e["alg_mult"].as_u64().unwrap()).sum();
    assert_eq!(total, 5);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(eig.iter().any(|e| (e["lambda"][0].as_f64().unwrap() - golden).abs() < 1e-12));
}

#[test]
fn csv_without_meta_is_deterministic() {
    let args = ["fourier", "--rep", "builtin:sum-of-digits", "--L", "5", "--format", "csv", "--no-meta"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("lambda_re,lambda_im,k,ell,phi_re,phi_im\n"), "{text}");
}

#[test]
fn csv_with_meta_has_comment_line() {
    let out = run(&["sum", "--rep", "builtin:sum-of-digits", "--N", "16", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# regseq "));
    assert_eq!(lines.next(), Some("N,X"));
    assert_eq!(lines.next(), Some("16,32"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["sum", "--rep", "builtin:sum-of-digits", "--N", "8", "--format", "json", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["X"], "12");
}

#[test]
fn esthetic_emits_fluctuation_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fluct.csv");
    let out = run(&[
        "esthetic",
        "--q",
        "4",
        "--L",
        "10",
        "--u-min",
        "8",
        "--u-max",
        "8.1",
        "--u-step",
        "0.05",
        "--no-meta",
        "--format",
        "json",
        "--emit-fluctuation",
        path.to_str().unwrap(),
    ]);
    let v = json_of(&out);
    assert_eq!(v["errorLogPower"], 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,empirical,reconstructed"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn tauber_reports_two_routes() {
    let v = json_of(&run(&[
        "tauber", "--kappa", "0", "--q", "2", "--m", "2", "--phi", &data("phi_cos.json"), "--Nmax", "10000", "--format", "json",
    ]));
    assert_eq!(v["flagQKappaUnit"], false);
    assert!(v["twoRouteDeviation"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["psi"].as_array().unwrap().len(), 3);
}

#[test]
fn tauber_unit_case_is_flagged() {
    // q^{κ+1} = 1 for κ = −1
    let v = json_of(&run(&[
        "tauber", "--kappa", "-1", "--q", "2", "--m", "2", "--phi", &data("phi_cos.json"), "--Nmax", "10000", "--format", "json",
    ]));
    assert_eq!(v["flagQKappaUnit"], true);
    assert!(v["twoRouteDeviation"].as_f64().unwrap() < 1e-7);
}

#[test]
fn exit_code_two_for_missing_and_malformed_input() {
    let out = run(&["eval", "--rep", "/nonexistent/rep.json", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"q":2,"d":2,"matrices":[[[1,0],[0,1]]],"left":[1,0],"v0":[0,1]}"#).unwrap();
    let out = run(&["eval", "--rep", path.to_str().unwrap(), "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&path, "{not json").unwrap();
    let out = run(&["eval", "--rep", path.to_str().unwrap(), "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_three_for_invalid_or_domain() {
    let out = run(&["tauber", "--kappa", "0", "--q", "2", "--m", "2", "--phi", &data("phi_cos.json"), "--alpha", "0.4", "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    // q^s = 2 is the dominant eigenvalue of the sum-of-digits representation
    let out = run(&["dirichlet", "--rep", "builtin:sum-of-digits", "--s", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_four_and_error_json() {
    let out = run(&["jsr", "--rep", "builtin:esthetic:4", "--max-len", "30", "--product-cap", "1000", "--error-json"]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "resource-limit");
    assert!(v["error"]["message"].as_str().unwrap().contains("cap"));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["fourier", "--rep", "builtin:esthetic:4", "--L", "4", "--format", "csv", "--no-meta"];
    let one = bin().args(args).env("REGSEQ_THREADS", "1").output().unwrap();
    let two = bin().args(args).env("REGSEQ_THREADS", "2").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    let bad = bin().args(args).env("REGSEQ_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_roundtrips_through_parser() {
    let out = run(&["dirichlet", "--rep", "builtin:sum-of-digits", "--s", "2.5,1", "--residual", "--format", "json"]);
    let v = json_of(&out);
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
}

fn schema_for(def: &str) -> jsonschema::Validator {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.push("docs/schema.json");
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
    doc["$ref"] = Value::String(format!("#/$defs/{def}"));
    jsonschema::validator_for(&doc).unwrap()
}

fn assert_valid(def: &str, v: &Value) {
    let validator = schema_for(def);
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{def}: {errors:?}");
}

#[test]
fn artifacts_match_schema() {
    let phi = data("phi_cos.json");
    let cases: [(&str, Vec<&str>); 11] = [
        ("eval", vec!["eval", "--rep", "builtin:sum-of-digits", "--n", "5"]),
        ("sum", vec!["sum", "--rep", "builtin:sum-of-digits", "--N", "5"]),
        ("spectrum", vec!["spectrum", "--rep", "builtin:esthetic:4"]),
        ("jsr", vec!["jsr", "--rep", "builtin:sum-of-digits", "--max-len", "3"]),
        ("dirichlet", vec!["dirichlet", "--rep", "builtin:sum-of-digits", "--s", "2.5,1", "--residual"]),
        ("fourier", vec!["fourier", "--rep", "builtin:sum-of-digits", "--L", "2"]),
        ("fluctuation", vec!["fluctuation", "--rep", "builtin:sum-of-digits", "--L", "2", "--u-min", "8", "--u-max", "8.02"]),
        ("combine", vec!["combine", "--rep", "builtin:esthetic:4", "--lambda", "1.618033988749895", "--L", "2"]),
        ("tauber", vec!["tauber", "--kappa", "0", "--q", "2", "--m", "2", "--phi", &phi, "--Nmax", "1000"]),
        ("esthetic", vec!["esthetic", "--q", "5", "--L", "2"]),
        ("sum", vec!["sum", "--rep", "builtin:esthetic:3", "--N", "100", "--brute"]),
    ];
    for (def, mut args) in cases {
        args.extend(["--format", "json"]);
        let v = json_of(&run(&args));
        assert_valid(def, &v);
    }
    let out = run(&["eval", "--rep", "/nonexistent", "--n", "1", "--error-json"]);
    assert_valid("error", &serde_json::from_slice(&out.stdout).unwrap());
}

#[test]
fn input_files_match_schema() {
    for f in ["sumdigits.json", "esthetic4.json"] {
        assert_valid("representation", &serde_json::from_str(&fs::read_to_string(data(f)).unwrap()).unwrap());
    }
    let bad: Value = serde_json::from_str(r#"{"N": 5, "X": "5", "exact": true, "method": "fast"}"#).unwrap();
    assert!(!schema_for("sum").is_valid(&bad));
    for f in ["phi_cos.json", "phi_one.json"] {
        assert_valid("phiFile", &serde_json::from_str(&fs::read_to_string(data(f)).unwrap()).unwrap());
    }
}
