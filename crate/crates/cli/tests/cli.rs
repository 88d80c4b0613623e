//! The `drinfeld` binary: exit codes, output formats and the documented runs.

use std::process::{Command, Output};

fn drinfeld(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drinfeld")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    drinfeld(args).status.code().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = drinfeld(args);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn h_product_starts_with_minus_t() {
    let v = json(&["expand", "--form", "h-product", "--q", "3", "--order", "20", "--json"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["series"]["terms"][0], serde_json::json!([1, "2"]));
    assert_eq!(v["series"]["truncation"], 20);
}

#[test]
fn eisenstein_constant_term_is_inverse_lambda() {
    let v = json(&["expand", "--form", "E", "--v", "0,1", "--q", "3", "--order", "20", "--json"]);
    assert_eq!(v["series"]["terms"][0], serde_json::json!([0, "1/l"]));
    assert_eq!(v["series"]["variable"], "t_T");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&["expand", "--form", "h-product", "--q", "1", "--order", "20"]), 2);
    assert_eq!(code(&["expand", "--form", "h-product", "--q", "6"]), 2);
    assert_eq!(code(&["expand", "--form", "h-product", "--q", "3", "--order", "1"]), 2);
    assert_eq!(code(&["expand", "--form", "E", "--q", "3"]), 2);
    assert_eq!(code(&["verify", "--suite", "nope", "--q", "3"]), 2);
    assert_eq!(code(&["verify", "--suite", "theorem1", "--q", "3", "--level", "T^2"]), 2);
    assert_eq!(code(&["lab", "weil", "--q", "3", "--n", "2", "--a", "T^2"]), 2);
}

#[test]
fn bad_level_is_rejected() {
    assert_eq!(code(&["lab", "weil", "--q", "3", "--n", "1", "--gammaT", "0", "--a", "T", "--seed", "1"]), 2);
}

#[test]
fn verify_exit_codes() {
    let out = drinfeld(&["verify", "--suite", "aexp-vs-product", "--q", "3", "--order", "81"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("PASS\n"));

    let v = json(&["verify", "--suite", "theorem1", "--q", "2", "--order", "32", "--json"]);
    assert_eq!(v["passed"], true);
    assert!(v["fitted"]["varsigma"].is_string());

    // the printed Serre identity fails in odd characteristic
    let out = drinfeld(&["verify", "--suite", "serre", "--q", "3", "--order", "40", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"][0]["status"], "fail");
    assert!(v["checks"][0]["first_mismatch"].is_i64());
    assert_eq!(v["fitted"]["sigma_normalized"], "1");
    assert_eq!(code(&["verify", "--suite", "serre", "--q", "2", "--order", "40"]), 0);
}

#[test]
fn weil_lab_documented_run() {
    let args = ["lab", "weil", "--q", "3", "--n", "2", "--a", "T^2", "--trials", "25", "--seed", "7", "--json"];
    let out = drinfeld(&args);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lab"], "weil");
    assert_eq!(v["modules"].as_array().unwrap().len(), 25);
    assert_eq!(drinfeld(&args).stdout, out.stdout);
}

#[test]
fn moduli_lab_runs_and_undecided_exits_3() {
    let out = drinfeld(&["lab", "moduli", "--q", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("jtilde"));
    // F_{q^(n(q-1))} cannot see every witness for odd q
    assert_eq!(code(&["lab", "moduli", "--q", "3", "--n", "2", "--ext-bound", "1"]), 3);
}

#[test]
fn out_path_receives_json() {
    let dir = std::env::temp_dir().join(format!("drinfeld-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let p = path.to_str().unwrap();
    let out = drinfeld(&["verify", "--suite", "det-torsion", "--q", "2", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "det-torsion");
    assert_eq!(v["order"], 16);
    std::fs::remove_dir_all(&dir).unwrap();
}
