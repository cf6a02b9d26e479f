//! The `dyndeg` binary: formats, output files and exit codes.

use std::process::{Command, Output};

use dyndeg::cli::report::Report;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_dyndeg"))
        .args(args)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.unwrap_or("").as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

const FIBRED: &str = r#"{"type": "monomial", "matrix": [[2, 0], [1, 3]], "fibration_dim": 1, "n_max": 20}"#;

#[test]
fn degrees_table_on_stdin() {
    let out = run(&["degrees"], Some(FIBRED));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3.0000000000"));
    assert!(text.contains("d_q(f|pi)"));
}

#[test]
fn csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.csv");
    let out = run(&["sequence", "--format", "csv", "--n-max", "6", "--out", path.to_str().unwrap()], Some(FIBRED));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("quantity,p,n,lambda_p,root_est,ratio_est\n"));
    assert!(csv.contains("\nlambda_1,1,6,1458,"));
}

#[test]
fn json_reparses() {
    let out = run(&["verify-product", "--format", "json"], Some(FIBRED));
    assert!(out.status.success());
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    let Report::VerifyProduct(v) = r else { panic!() };
    assert_eq!(v.verdict.to_string(), "PASS");
}

#[test]
fn validation_errors_exit_1() {
    let bad = [
        r#"{"type": "monomial", "matrix": [[2, 1], [1, 1]], "fibration_dim": 1}"#,
        r#"{"type": "monomial", "matrix": [[1, 2], [2, 4]]}"#,
        r#"{"type": "monomial", "matrix": [[1]], "colour": 3}"#,
        "not json",
    ];
    for text in bad {
        let out = run(&["degrees"], Some(text));
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: invalid job"));
    }
    let out = run(&["verify-product"], Some(r#"{"type": "monomial", "matrix": [[2, 1], [1, 1]]}"#));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("block lower-triangular"));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(run(&["--help"], None).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_2() {
    let out = run(&["degrees", "--out", "/nonexistent/dir/report.txt"], Some(FIBRED));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn short_suite_is_inconclusive_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    std::fs::write(&path, r#"{"suite_size": 10, "max_k": 3}"#).unwrap();
    let out = run(&["suite", "--n-max", "2", "--format", "json", "--input", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let Report::Suite(s) = serde_json::from_slice(&out.stdout).unwrap() else { panic!() };
    assert_eq!(s.verdict.to_string(), "INCONCLUSIVE");
    assert!(s.failures.is_empty());
}
