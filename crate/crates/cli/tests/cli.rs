use std::path::PathBuf;
use std::process::{Command, Output};

const WIDTH1: &str = r#"{ "format": 1, "modulus": 10007, "kind": "roabp", "variables": ["x1", "x2"],
  "width": 1, "blocks": [["x1"], ["x2"]],
  "layers": [[{"exponents": {"x1": 1}, "matrix": [[1]]}], [{"exponents": {"x2": 1}, "matrix": [[1]]}]],
  "left": {"block": [], "entries": [[{"exponents": {}, "coeff": 1}]]},
  "right": {"block": [], "entries": [[{"exponents": {}, "coeff": 1}]]} }"#;

// (x1 + 2 x2)(x3 + 1) and the same product with the opposite scale
const CANCEL: &str = r#"{ "format": 1, "modulus": 10007, "kind": "depth3", "variables": ["x1", "x2", "x3"],
  "gates": [
    {"scale": 3, "forms": [{"const": 0, "coeffs": {"x1": 1, "x2": 2}}, {"const": 1, "coeffs": {"x3": 1}}]},
    {"scale": 10004, "forms": [{"const": 0, "coeffs": {"x1": 1, "x2": 2}}, {"const": 1, "coeffs": {"x3": 1}}]}
  ] }"#;

const ROWS: &str = r#"{ "format": 1, "modulus": 10007, "kind": "depth3", "variables": ["a", "b", "c", "d"],
  "gates": [
    {"scale": 1, "forms": [{"const": 1, "coeffs": {"a": 1, "b": 1}}, {"const": 0, "coeffs": {"c": 1, "d": 1}}]},
    {"scale": 5, "forms": [{"const": 0, "coeffs": {"a": 1, "c": 1}}, {"const": 2, "coeffs": {"b": 1, "d": 3}}]}
  ] }"#;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn pit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn hs_then_test_round_trip() {
    let input = write("w1.json", WIDTH1);
    let pts = scratch("w1.pts");
    let o = pit(&["hs", "roabp", "--input", input.to_str().unwrap(), "--out", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&pts).unwrap();
    assert!(text.starts_with("# generator roabp-whitebox"));
    let o = pit(&["test", "--input", input.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("pass"));
}

#[test]
fn miss_exits_one() {
    let input = write("w1b.json", WIDTH1);
    let pts = write("zero.pts", "# generator hand\n0,5\n7,0\n");
    let o = pit(&["test", "--input", input.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("fail"));
}

#[test]
fn expand_and_zero_test() {
    let w1 = write("w1c.json", WIDTH1);
    let o = pit(&["expand", "--input", w1.to_str().unwrap()]);
    assert_eq!(stdout(&o), "1 x1*x2\n");
    let cancel = write("cancel.json", CANCEL);
    let o = pit(&["expand", "--input", cancel.to_str().unwrap()]);
    assert_eq!(stdout(&o), "0\n");
    let o = pit(&["whitebox", "sum-sml", "--input", cancel.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict zero"));
    let rows = write("rows.json", ROWS);
    let o = pit(&["whitebox", "sum-sml", "--input", rows.to_str().unwrap()]);
    assert!(stdout(&o).contains("verdict nonzero"), "{}", stdout(&o));
}

#[test]
fn distance_and_decompose() {
    let rows = write("rows2.json", ROWS);
    let o = pit(&["distance", "--input", rows.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("distance 2"), "{}", stdout(&o));
    let out = scratch("bases.json");
    let o = pit(&["decompose", "--input", rows.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["m"], 2);
    assert_eq!(doc["within_cap"], true);
}

#[test]
fn exit_codes() {
    let bad = write("bad.json", "{ \"format\": 1, ");
    assert_eq!(pit(&["expand", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(pit(&["frobnicate"]).status.code(), Some(2));
    let w1 = write("w1d.json", WIDTH1);
    // GF(3) cannot supply the sweep values
    let o = pit(&["--modulus", "3", "hs", "roabp", "--input", w1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = pit(&["--ceiling", "0", "expand", "--input", w1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_is_deterministic_across_jobs() {
    let a = pit(&["verify", "--class", "roabp", "--samples", "4", "--seed", "9", "--n", "4", "--d", "3"]);
    let b = pit(&["--jobs", "3", "verify", "--class", "roabp", "--samples", "4", "--seed", "9", "--n", "4", "--d", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("summary passed=4"));
}
