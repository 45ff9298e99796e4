use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xmodlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xmodlab")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = xmodlab(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|_| panic!("not JSON: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

fn emit(name: &str, path: &Path) {
    let out = xmodlab(&["catalog", "show", name, "--emit", path.to_str().unwrap()]);
    assert!(out.status.success());
}

fn identity_rows(n: usize) -> String {
    let row: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    vec![row.join(" "); n].join("\n")
}

/// S3 acting trivially on itself with the identity boundary.
fn broken_xmod(dir: &Path) -> String {
    let path = dir.join("broken.txt");
    emit("S3-group", &path);
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str(&format!(
        "\naction triv\nactor S3-group\nacted S3-group\ndot\n{}\n\nxmod broken\nA S3-group\nB S3-group\nalpha\n0 1 2 3 4 5\naction triv\n",
        identity_rows(6)
    ));
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn broken_crossed_module_reports_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = broken_xmod(dir.path());
    let (code, v) = json(&["validate-xmod", &path]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "invalid");
    let violations = v["findings"]["xmods"][0]["report"]["violations"].as_array().unwrap();
    let cm2 = violations.iter().find(|x| x["rule"] == "CM2").expect("CM2 violation");
    assert_eq!(cm2["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn emitted_entries_validate() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, name) in [
        ("validate-algebra", "Z4-ring"),
        ("validate-action", "S3-conj-action"),
        ("validate-xmod", "2Z4-in-Z4-ring"),
        ("validate-groupoid", "delta-S3-conj-xmod"),
        ("validate-groupoid", "pair-V4"),
    ] {
        let path = dir.path().join(format!("{name}.txt"));
        emit(name, &path);
        let (code, v) = json(&[cmd, path.to_str().unwrap()]);
        assert_eq!((code, v["status"].as_str()), (0, Some("ok")), "{name}");
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "algebra x\norder 2\nbinops 0\nunops 0\nadd\n0 1\n1 zz\nneg\n0 1\n").unwrap();
    let out = xmodlab(&["validate-algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("line 7"));
}

#[test]
fn missing_file_and_unknown_name_are_errors() {
    let (code, v) = json(&["validate-algebra", "/nonexistent/x.txt"]);
    assert_eq!((code, v["status"].as_str()), (2, Some("error")));
    let (code, _) = json(&["derivations", "--xmod", "no-such-xmod"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(xmodlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(xmodlab(&["--seed-order", "random", "catalog", "list"]).status.code(), Some(2));
    assert_eq!(xmodlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_writes_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = xmodlab(&["--json", "--out", out_path.to_str().unwrap(), "whitehead", "--xmod", "Z4-id-trivial"]);
    assert!(out.status.success());
    assert_eq!(fs::read(&out_path).unwrap(), out.stdout);
}

#[test]
fn library_files_resolve_names() {
    let dir = tempfile::tempdir().unwrap();
    let lib = dir.path().join("lib.txt");
    emit("Z4-group", &lib);
    let main = dir.path().join("main.txt");
    fs::write(
        &main,
        "action triv\nactor Z4-group\nacted Z4-group\ndot\n0 1 2 3\n0 1 2 3\n0 1 2 3\n0 1 2 3\n\nxmod twice\nA Z4-group\nB Z4-group\nalpha\n0 2 0 2\naction triv\n",
    )
    .unwrap();
    let (code, v) = json(&["--lib", lib.to_str().unwrap(), "validate-xmod", main.to_str().unwrap()]);
    assert_eq!((code, v["status"].as_str()), (0, Some("ok")));
    let (code, v) = json(&["--lib", lib.to_str().unwrap(), "derivations", "--xmod", "twice", main.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn budget_is_enforced() {
    let (code, v) = json(&["--budget", "3", "derivations", "--xmod", "S3-conj-xmod"]);
    assert_eq!((code, v["status"].as_str()), (2, Some("error")), "{v}");
    let out = Command::new(env!("CARGO_BIN_EXE_xmodlab"))
        .env("XMODLAB_BUDGET", "3")
        .args(["--json", "derivations", "--xmod", "S3-conj-xmod"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn derive_reports_the_derived_boundary() {
    let (code, v) = json(&["derive", "--xmod", "Z4-id-trivial", "--d", "0,2,0,2"]);
    assert_eq!(code, 0, "{v}");
    let text = v["findings"].to_string();
    assert!(text.contains("[0,3,2,1]"), "{text}");
    let (code, v) = json(&["derive", "--xmod", "Z4-id-trivial", "--d", "0,1,2,3"]);
    assert_eq!(code, 0, "{v}");
    let (code, _) = json(&["derive", "--xmod", "Z4-id-trivial", "--d", "0,1,0,1"]);
    assert_eq!(code, 1);
}

#[test]
fn catalog_self_test_passes() {
    let lines = xmodlab::catalog::self_test().unwrap();
    assert_eq!(lines.len(), xmodlab::catalog::names().len());
}
