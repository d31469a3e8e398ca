use std::path::{Path, PathBuf};
use std::process::Command;

use ramsey_core::cli::{run, EXIT_FAILS, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE};
use serde_json::Value;

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(d: &Path, name: &str, text: &str) -> String {
    let p = d.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn antichain(n: usize) -> String {
    let leq: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    serde_json::json!({ "kind": "ordered_poset", "leq": leq, "order": (0..n).collect::<Vec<_>>() }).to_string()
}

fn ramsey(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["ramsey"];
    argv.extend_from_slice(args);
    let out = run(argv);
    let report = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, report)
}

#[test]
fn pigeonhole_holds_and_fails() {
    let d = dir("pigeonhole");
    let point = write(&d, "point.json", &antichain(1));
    let pair = write(&d, "pair.json", &antichain(2));
    let a2 = write(&d, "a2.json", &antichain(2));
    let a3 = write(&d, "a3.json", &antichain(3));
    let (code, r) = ramsey(&[
        "--deterministic",
        "arrow",
        "--host",
        &a3,
        "--pattern",
        &point,
        "--target",
        &pair,
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["verdict"], "holds");
    assert!(r.get("wall_clock_ms").is_none());
    let (code, r) = ramsey(&[
        "--deterministic",
        "arrow",
        "--host",
        &a2,
        "--pattern",
        &point,
        "--target",
        &pair,
    ]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(r["verdict"], "fails");
    assert_eq!(r["certificates_verified"], true);
}

#[test]
fn node_limit_gives_unknown() {
    let d = dir("unknown");
    let host = write(
        &d,
        "host.json",
        &serde_json::to_string(&ramsey_core::io::structure_doc(
            &ramsey_core::Structure::OrderedPoset(ramsey_core::pi(5).unwrap()),
            None,
            None,
        ))
        .unwrap(),
    );
    let a = write(&d, "a.json", &antichain(2));
    let b = write(
        &d,
        "b.json",
        r#"{"kind":"ordered_poset","leq":[[true,false,true,false],[false,true,false,false],[false,false,true,false],[false,false,false,true]],"order":[0,1,2,3]}"#,
    );
    let (code, r) = ramsey(&[
        "--deterministic",
        "--node-limit",
        "1",
        "arrow",
        "--host",
        &host,
        "--pattern",
        &a,
        "--target",
        &b,
    ]);
    assert_eq!(code, EXIT_UNKNOWN);
    assert_eq!(r["verdict"], "unknown");
}

#[test]
fn antichain_is_its_own_op_witness() {
    let d = dir("op");
    let s = write(&d, "anti.json", &antichain(2));
    let (code, r) = ramsey(&["op-witness", "--structure", &s]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["result"]["n"], Value::Null);
    assert_eq!(r["result"]["witness_size"], 2);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let d = dir("bad");
    let bad = write(&d, "bad.json", "{not json");
    let (code, r) = ramsey(&["validate", "--structure", &bad]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(r["verdict"], "error");
    let unknown = write(&d, "unknown.json", r#"{"kind":"poset","leq":[[true]],"colour":1}"#);
    assert_eq!(ramsey(&["validate", "--structure", &unknown]).0, EXIT_USAGE);
    assert_eq!(ramsey(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(
        ramsey(&["validate", "--structure", "/nonexistent/file.json"]).0,
        EXIT_USAGE
    );
}

#[test]
fn invariant_violation_is_reported() {
    let d = dir("violation");
    let cyclic = write(&d, "cyclic.json", r#"{"kind":"poset","leq":[[true,true],[true,true]]}"#);
    let (code, r) = ramsey(&["validate", "--structure", &cyclic]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(r["verdict"], "violation");
}

#[test]
fn identities_on_m3() {
    let d = dir("identity");
    let m3 = write(
        &d,
        "m3.json",
        r#"{"kind":"lattice","leq":[[true,true,true,true,true],[false,true,false,false,true],[false,false,true,false,true],[false,false,false,true,true],[false,false,false,false,true]]}"#,
    );
    let (code, r) = ramsey(&["identity", "--lattice", &m3, "--check", "distributive"]);
    assert_eq!(code, EXIT_FAILS);
    assert!(r["result"]["countermodel"].is_object());
    assert_eq!(ramsey(&["identity", "--lattice", &m3, "--check", "modular"]).0, EXIT_OK);
}

#[test]
fn pi_emits_a_structure_that_validates() {
    let d = dir("pi");
    let out = d.join("pi3.json").display().to_string();
    assert_eq!(ramsey(&["pi", "--n", "3", "--emit", &out]).0, EXIT_OK);
    let (code, r) = ramsey(&["validate", "--structure", &out]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["inputs"][0]["name"], out);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn census_and_wtc() {
    let (code, r) = ramsey(&["census", "--n-max", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(r["result"].is_array() || r["result"].is_object());
    assert_eq!(ramsey(&["wtc"]).0, EXIT_OK);
}

#[test]
fn report_goes_to_out_file() {
    let d = dir("out");
    let out = d.join("report.json").display().to_string();
    let res = run(["ramsey", "--out", out.as_str(), "census", "--n-max", "2"]);
    assert_eq!(res.code, EXIT_OK);
    assert!(res.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["command"], "census");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_ramsey");
    let help = Command::new(exe).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(EXIT_OK));
    let bad = Command::new(exe).arg("arrow").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    let census = Command::new(exe)
        .args(["--deterministic", "census", "--n-max", "3"])
        .output()
        .unwrap();
    assert_eq!(census.status.code(), Some(EXIT_OK));
    let r: Value = serde_json::from_slice(&census.stdout).unwrap();
    assert_eq!(r["exit_code"], 0);
}
