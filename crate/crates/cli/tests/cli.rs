use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ptm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptm"))
        .args(args)
        .output()
        .expect("ptm runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

const NOT_KRAUS: &str = r#"{"n": 1, "ops": [{"re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}]}"#;
const Z_PROJECTORS: &str = r#"{"n": 1, "projectors": [
    {"re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]},
    {"re": [[0, 0], [0, 1]], "im": [[0, 0], [0, 0]]}]}"#;
const IDENTITY_GATE: &str = r#"{"n": 1, "class": "tp", "matrix": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}"#;

fn all_verdicts_pass(v: &Value) -> bool {
    v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x["pass"] == Value::Bool(true))
}

#[test]
fn check_identity_passes() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "identity.json", IDENTITY_GATE);
    let out = ptm(&["--json", "check", "--gate", g.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(all_verdicts_pass(&json(&out)));
}

#[test]
fn convert_then_check_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(dir.path(), "not.json", NOT_KRAUS);
    let g = dir.path().join("gate.json");
    let out = ptm(&[
        "convert",
        "--kraus",
        k.to_str().unwrap(),
        "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = ptm(&["--json", "check", "--gate", g.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    for name in ["reality", "row-0", "orthogonality", "cp"] {
        let verdict = v["verdicts"]
            .as_array()
            .unwrap()
            .iter()
            .find(|x| x["name"] == name)
            .unwrap();
        assert_eq!(verdict["pass"], Value::Bool(true), "{name}");
    }
    let out = ptm(&["--json", "check", "--kraus", k.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(all_verdicts_pass(&json(&out)));
}

#[test]
fn convert_prints_data_file_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(dir.path(), "not.json", NOT_KRAUS);
    let out = ptm(&["convert", "--kraus", k.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["class"], "tp");
    assert_eq!(v["matrix"][2][2].as_f64(), Some(-1.0));
    let again = ptm(&["--json", "convert", "--kraus", k.to_str().unwrap()]);
    assert_eq!(stdout(&out), stdout(&again));
}

#[test]
fn non_cp_gate_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(
        dir.path(),
        "bad.json",
        r#"{"n": 1, "class": "tp", "matrix": [[1, 0, 0, 0], [0, 1.5, 0, 0], [0, 0, 1.5, 0], [0, 0, 0, 1.5]]}"#,
    );
    let out = ptm(&["--json", "check", "--gate", g.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["ok"], Value::Bool(false));
    let cp = v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["name"] == "cp")
        .unwrap();
    assert!((cp["value"].as_f64().unwrap() + 0.25).abs() < 1e-12);
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(
        dir.path(),
        "broken.json",
        r#"{"n": 1, "class": "tp", "matrix": [[1, 0]]}"#,
    );
    let out = ptm(&["check", "--gate", g.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(
        code(&ptm(&["check", "--gate", "/nonexistent/file.json"])),
        1
    );
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    let out = ptm(&["run", "--circuit", "c.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    let out = ptm(&["measure", "--state", "s.json", "--projectors", "p.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    let out = ptm(&["primitive", "--gate", "builtin:CNOT"]);
    assert_eq!(code(&out), 2);
    let out = ptm(&["check", "--gate", "a", "--kraus", "b"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--kraus"));
    assert_eq!(code(&ptm(&["frobnicate"])), 2);
    assert_eq!(code(&ptm(&["--help"])), 0);
}

fn circuit_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "z.json", Z_PROJECTORS);
    write(
        dir.path(),
        "c.json",
        r#"{"width": 2, "initial": {"computational": [3, 0]},
            "steps": [{"gate": "H", "targets": [0]},
                      {"gate": "CNOT", "targets": [0, 1]},
                      {"measure": {"file": "z.json"}, "targets": [0]},
                      {"measure": {"file": "z.json"}, "targets": [1]}]}"#,
    );
    dir
}

#[test]
fn run_is_deterministic_per_seed() {
    let dir = circuit_dir();
    let c = dir.path().join("c.json");
    let a = ptm(&["run", "--circuit", c.to_str().unwrap(), "--seed", "7"]);
    let b = ptm(&["run", "--circuit", c.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let j = json(&ptm(&[
        "--json",
        "run",
        "--circuit",
        c.to_str().unwrap(),
        "--seed",
        "7",
    ]));
    let t = j["transcript"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    for e in t {
        let total: f64 = e["probabilities"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p.as_f64().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
    // Bell pair: the second measurement repeats the first outcome.
    assert_eq!(t[0]["branch"], t[1]["branch"]);
}

#[test]
fn run_reports_step_errors() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.json",
        r#"{"width": 1, "initial": {"computational": [0]}, "steps": [{"gate": "CNOT", "targets": [0]}]}"#,
    );
    let out = ptm(&["run", "--circuit", c.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 0"));
}

#[test]
fn measure_samples_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "z.json", Z_PROJECTORS);
    let s = write(
        dir.path(),
        "s.json",
        r#"{"n": 1, "coeffs": [0.7071067811865476, 0.7071067811865476, 0, 0]}"#,
    );
    let out = ptm(&[
        "--json",
        "measure",
        "--state",
        s.to_str().unwrap(),
        "--projectors",
        p.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let probs: Vec<f64> = v["probabilities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((probs[0] - 0.5).abs() < 1e-12 && (probs[1] - 0.5).abs() < 1e-12);
}

#[test]
fn decompose_amplitude_damping() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(
        dir.path(),
        "ad.json",
        r#"{"n": 1, "ops": [{"re": [[1, 0], [0, 0.70710678118654757]], "im": [[0, 0], [0, 0]]},
                            {"re": [[0, 0.70710678118654757], [0, 0]], "im": [[0, 0], [0, 0]]}]}"#,
    );
    let g = dir.path().join("g.json");
    assert_eq!(
        code(&ptm(&[
            "convert",
            "--kraus",
            k.to_str().unwrap(),
            "--out",
            g.to_str().unwrap()
        ])),
        0
    );
    let v = json(&ptm(&[
        "--json",
        "decompose",
        "--gate",
        g.to_str().unwrap(),
    ]));
    let t: Vec<f64> = v["translation"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let l: Vec<f64> = v["singular_values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(t[0].abs() < 1e-12 && t[1].abs() < 1e-12 && (t[2] - 0.5).abs() < 1e-12);
    assert!(
        (l[0] - 0.5f64.sqrt()).abs() < 1e-12
            && (l[1] - 0.5f64.sqrt()).abs() < 1e-12
            && (l[2] - 0.5).abs() < 1e-12
    );
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn primitive_and_closure() {
    let v = json(&ptm(&[
        "--json",
        "primitive",
        "--gate",
        "builtin:CNOT",
        "--seed",
        "1",
    ]));
    assert_eq!(v["primitive"], Value::Bool(false));
    let v = json(&ptm(&[
        "--json",
        "primitive",
        "--gate",
        "builtin:SWAP",
        "--seed",
        "1",
    ]));
    assert_eq!(v["primitive"], Value::Bool(true));
    let v = json(&ptm(&["--json", "closure", "--local"]));
    assert_eq!(v["dimension"], 62);
    assert_eq!(code(&ptm(&["closure", "--local", "--random", "1"])), 2);
}

#[test]
fn classical_subcommand() {
    let out = ptm(&["--json", "classical", "--laws"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["all_agree"], Value::Bool(true));
    let out = ptm(&["--json", "classical", "--name", "neg", "--quantum"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["table"], serde_json::json!([3, 2, 1, 0]));
    assert_eq!(v["contract"], Value::Bool(true));
    let v = json(&ptm(&["--json", "classical", "--expr", "x1 & x2", "--dnf"]));
    assert_eq!(v["arity"], 2);
    assert_eq!(code(&ptm(&["classical", "--expr", "x1 &"])), 1);
}

#[test]
fn compose_in_application_order() {
    let out = ptm(&["compose", "--gate", "builtin:H", "--gate", "builtin:H"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((v["matrix"][i][j].as_f64().unwrap() - want).abs() < 1e-12);
        }
    }
    // X then H maps sigma_3 to -sigma_1; H then X maps it to sigma_1.
    let xh = json(&ptm(&[
        "compose",
        "--gate",
        "builtin:X",
        "--gate",
        "builtin:H",
    ]));
    assert!((xh["matrix"][1][3].as_f64().unwrap() + 1.0).abs() < 1e-12);
}
