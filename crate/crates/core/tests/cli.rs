use std::io::Write;
use std::process::{Command, Stdio};

use elconn::cli::dispatch;

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(std::iter::once("elconn").chain(args.iter().copied()), &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn corpus(name: &str) -> String {
    format!("{}/tests/corpus/valid/{name}", env!("CARGO_MANIFEST_DIR"))
}

const GOLDEN: &str = "El(rho=u, phi=2*u^-3, R=[(1:1)])";

#[test]
fn fourier_golden_from_stdin() {
    let (code, out, _) = run(&["fourier", "--kind", "0inf", "--sign", "minus", "-"], GOLDEN);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "El(rho=-1/6*u^4, phi=8/1*u^-3, R=[(-1:1)])");
}

#[test]
fn fourier_kinds() {
    let steep = "El(rho=u, phi=u^-3, R=[(1:1)])";
    let (code, out, _) = run(&["fourier", "--kind", "infinf", "--sign", "plus", "-"], steep);
    assert_eq!(code, 0, "{out}");
    let (code, _, err) = run(&["fourier", "--kind", "inf0", "-"], steep);
    assert_eq!(code, 1);
    assert!(err.contains("slope"));
    let gentle = "El(rho=u^3, phi=u^-1, R=[(1:1)])";
    let (code, out, _) = run(&["fourier", "--kind", "inf0", "-"], gentle);
    assert_eq!((code, out.contains("u^2")), (0, true), "{out}");
    let (code, out, _) = run(&["fourier", "--kind", "sinf", "--s", "2", "-"], "Reg(R=[(1:2), (-1:1)])");
    assert_eq!(code, 0);
    assert!(out.contains("El(rho=1/1*u^1"), "{out}");
}

#[test]
fn json_output_has_invariants() {
    let (code, out, _) = run(&["--json", "canon", "-"], GOLDEN);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let s = &v["summands"][0];
    assert_eq!((s["p"].as_u64(), s["q"].as_u64(), s["irr"].as_u64()), (Some(1), Some(3), Some(3)));
    assert_eq!(v["total"]["rank"], 1);
}

#[test]
fn structural_commands() {
    let a = corpus("15_named_many.conn");
    let (code, out, _) = run(&["tensor", &format!("{a}#b"), &format!("{a}#c")], "");
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["hom", &format!("{a}#b"), &format!("{a}#b")], "");
    assert_eq!(code, 0);
    assert!(out.starts_with("Reg("), "{out}");
    let (code, out, _) = run(&["dual", &format!("{a}#c")], "");
    assert_eq!((code, out.trim()), (0, "El(rho=1/1*u^1, phi=1/1*u^-3, R=[(1/2:1)])"));
    let (code, out, _) = run(&["det", &format!("{a}#b")], "");
    assert_eq!((code, out.trim()), (0, "Reg(R=[(-1:1)])"));
    let (code, out, _) = run(&["invariants", &a], "");
    assert_eq!(code, 0);
    assert!(out.contains("slope 3, irr 3, rank 1"), "{out}");
    let (code, _, err) = run(&["canon", &format!("{a}#missing")], "");
    assert_eq!(code, 1);
    assert!(err.contains("missing"));
}

#[test]
fn iso_exit_codes() {
    let a = "El(rho=2*u, phi=u^-1, R=[(1:1)])";
    let path = std::env::temp_dir().join("elconn_iso_test.conn");
    std::fs::write(&path, "x = El(rho=u, phi=2*u^-1, R=[(1:1)]);\ny = El(rho=u, phi=3*u^-1, R=[(1:1)]);\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["iso", "-", &format!("{p}#x")], a);
    assert_eq!(code, 0);
    assert!(out.starts_with("isomorphic"));
    let (code, _, err) = run(&["iso", "-", &format!("{p}#y")], a);
    assert_eq!(code, 1);
    assert!(err.contains("not isomorphic"));
}

#[test]
fn rigidity_and_z_zhat() {
    let doc = r#"{"genus": 0, "points": [
        {"at": "0", "psi": "[(res:1/5:1), (res:2/5:1)]"},
        {"at": "1", "psi": "[(res:1/7:1), (1:1)]"},
        {"at": "inf", "psi": "[(res:1/3:1), (res:1/11:1)]"}]}"#;
    let (code, out, _) = run(&["rigidity", "-"], doc);
    assert_eq!(code, 0);
    assert!(out.starts_with("rigidity index: 2"), "{out}");
    let (code, out, _) = run(&["--json", "rigidity", "-"], doc);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rigidity"], 2);

    let z = r#"{"data": [
        {"at": "0", "summands": "El(rho=u, phi=u^-1, R=[(1:1)])"},
        {"at": "inf", "summands": "El(rho=u, phi=u^-2, R=[(1:1)])"}], "data_hat": []}"#;
    let (code, out, _) = run(&["z-zhat", "-"], z);
    assert_eq!((code, out.trim()), (0, "discrepancy: 0"));

    let mismatch = r#"{"genus": 0, "points": [{"at": "0", "psi": "[(2:1)]"}, {"at": "inf", "psi": "[(2:2)]"}]}"#;
    let (code, _, _) = run(&["rigidity", "-"], mismatch);
    assert_eq!(code, 1);
}

#[test]
fn json_input_errors_are_parse_errors() {
    let (code, _, err) = run(&["rigidity", "-"], "{\"points\": [");
    assert_eq!(code, 2);
    assert!(err.starts_with("<stdin>:"), "{err}");
    let (code, _, err) = run(&["rigidity", "-"], r#"{"points": [{"at": "0", "psi": "[(0:1)]"}]}"#);
    assert_eq!(code, 2);
    assert!(err.contains("points[0].psi:1:"), "{err}");
}

#[test]
fn oracle_command() {
    let (code, out, _) = run(&["oracle-check", "--a", "-3/2", "--q", "3"], "");
    assert_eq!(code, 0);
    assert!(out.contains("monodromy    ok"), "{out}");
    let (code, out, _) = run(&["--json", "oracle-check", "--grid"], "");
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 30);
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == true));
    let (code, _, _) = run(&["oracle-check", "--q", "2"], "");
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"], "").0, 2);
    assert_eq!(run(&["fourier", "--kind", "sideways", "-"], "").0, 2);
    assert_eq!(run(&["--field-order", "0", "canon", "-"], GOLDEN).0, 2);
    assert_eq!(run(&["--help"], "").0, 0);
}

#[test]
fn precision_flag_is_scoped() {
    let (code, out, _) = run(&["--precision", "40", "fourier", "--kind", "0inf", "-"], GOLDEN);
    assert_eq!(code, 0);
    assert!(out.contains("phi=8/1*u^-3"));
    assert_eq!(elconn::series::working_window(1, 1), elconn::series::default_window(1, 1));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_elconn");
    let mut child = Command::new(bin)
        .args(["canon", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"El(rho=u, phi=u^-1").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("<stdin>:"));

    let out = Command::new(bin).args(["canon", &corpus("05_ramified.conn")]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn first_golden_case_text() {
    let (code, out, _) = run(&["fourier", "--kind", "0inf", "--sign", "minus", "-"], "El(rho=u, phi=1/1*u^-1, R=[(1:1)])");
    assert_eq!((code, out.as_str()), (0, "El(rho=-1/1*u^2, phi=2/1*u^-1, R=[(-1:1)])\n"));
}
