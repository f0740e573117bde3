use std::process::{Command, Output};

use serde_json::{json, Value};
use surfmmp::scene::builtin;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surfmmp"))
        .args(args)
        .output()
        .unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn scene_files_and_built_ins_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cusp.json");
    std::fs::write(&path, builtin("example-4.3").unwrap().to_json()).unwrap();
    let mut from_file = json_of(&["zariski", path.to_str().unwrap()]);
    let mut built_in = json_of(&["zariski", "example-4.3"]);
    from_file["scene"] = Value::Null;
    built_in["scene"] = Value::Null;
    assert_eq!(from_file, built_in);
    assert_eq!(built_in["negative"], json!({"C": "1/2"}));
}

#[test]
fn divisor_expressions() {
    let v = json_of(&["zariski", "example-4.3", "--divisor=-K"]);
    assert_eq!(v["negative"], json!({"C": "1/2"}));
    let v = json_of(&["zariski", "example-4.3", "--divisor", "C + 2E"]);
    assert_eq!(v["negative"], json!({}));
    let v = json_of(&["zariski", "example-4.3", "--divisor", "2C + E"]);
    assert_eq!(v["negative"], json!({"C": "3/2"}));
    let v = json_of(&["zariski", "example-trivial", "--divisor", "1/2*L"]);
    assert_eq!(v["negative"], json!({}));
    assert_eq!(v["nef_scope"], json!("axiom_cone"));
}

#[test]
fn boundary_override_makes_a_point_redundant() {
    let v = json_of(&["redundant", "example-4.3", "--point", "C:1,E:1"]);
    assert_eq!(v["redundant"], json!(false));
    let v = json_of(&[
        "redundant",
        "example-4.3",
        "--boundary",
        "1/2*E",
        "--point",
        "C:1,E:1",
    ]);
    assert_eq!(v["mult_n"], json!("3/4"));
    assert_eq!(v["mult_boundary"], json!("1/2"));
    assert_eq!(v["redundant"], json!(true));
}

#[test]
fn discrepancy_of_curves_and_chains() {
    let v = json_of(&["discrepancy", "example-4.3", "--curve", "C"]);
    assert_eq!(v["log_discrepancy"], json!("1"));
    assert_eq!(v["sigma"], json!("1/2"));
    assert_eq!(v["potential_log_discrepancy"], json!("1/2"));
    let v = json_of(&["discrepancy", "example-4.3", "--chain", "C:1,E:1"]);
    assert_eq!(v["log_discrepancy"], json!("2"));
    assert_eq!(v["sigma"], json!("1/2"));
}

#[test]
fn mmp_and_estimate_reports() {
    let v = json_of(&["mmp", "example-4.3"]);
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
    assert_eq!(v["steps"][0]["discrepancy"], json!("-1/2"));
    assert_eq!(v["pklt"]["certified"], json!(true));
    let v = json_of(&["lct", "example-4.2", "--depth", "1"]);
    assert_eq!(v["estimate"]["epsilon"], json!("5/6"));
}

#[test]
fn graph_files_with_several_components() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(
        &path,
        r#"{"weights": [-2, -4, -3, -3], "edges": [[0, 1], [2, 3]]}"#,
    )
    .unwrap();
    let v = json_of(&["classify-graph", "--graph", path.to_str().unwrap()]);
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[0]["matched_family"], json!("-2 -4"));
    assert_eq!(comps[1]["redundant_free"], json!(false));
    assert_eq!(v["redundant_free"], json!(false));

    std::fs::write(&path, "{\"weights\": [-2,\n  \"x\"]}").unwrap();
    let out = run(&["classify-graph", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["zariski"][..],
        &["classify-graph"],
        &["verify-example", "4.4"],
        &["scene", "nothing"],
        &["discrepancy", "example-4.3"],
        &["zariski", "example-4.3", "--divisor", "C+Z"],
        &[
            "discrepancy",
            "example-4.3",
            "--curve",
            "C",
            "--boundary",
            "2*C",
        ],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    assert!(run(&["--help"]).status.success());
}
