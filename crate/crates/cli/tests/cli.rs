//! End-to-end checks of the binary: exit codes, stream discipline, and
//! lossless re-ingestion of emitted measures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pframes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn corpus(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let onb = write(
        dir,
        "onb.json",
        r#"{"dim":2,"type":"discrete","points":[[1.0,0.0],[0.0,1.0]],"weights":[0.5,0.5]}"#,
    );
    let line = write(
        dir,
        "line.json",
        r#"{"dim":2,"type":"discrete","points":[[1.0,0.0],[2.0,0.0]],"weights":[0.5,0.5]}"#,
    );
    let lopsided = write(
        dir,
        "lopsided.json",
        r#"{"dim":2,"type":"discrete","points":[[1.0,0.0],[0.0,0.5]],"weights":[0.5,0.5]}"#,
    );
    (onb, line, lopsided)
}

#[test]
fn success_emits_json_on_stdout_only() {
    let dir = TempDir::new().unwrap();
    let (onb, _, _) = corpus(dir.path());
    let out = run(&["analyze", onb.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["bounds"]["lower"], 0.5);
    assert_eq!(value["bounds"]["tight"], true);
}

#[test]
fn invalid_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());

    let missing = dir.path().join("missing.json");
    let out = run(&["analyze", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let (onb, _, _) = corpus(dir.path());
    let out = run(&["mix", onb.to_str().unwrap(), "--eps", "1.5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["mc-verify", "--spec", "nope", "--n", "2", "--m", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn math_preconditions_exit_3() {
    let dir = TempDir::new().unwrap();
    let (onb, line, lopsided) = corpus(dir.path());

    // A POVM needs a tight measure.
    let out = run(&["povm", lopsided.to_str().unwrap(), "--cells", "0|1"]);
    assert_eq!(out.status.code(), Some(3));

    // The dual needs a spanning support.
    let out = run(&["dual", line.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // Distance needs matching dimensions.
    let three = write(
        dir.path(),
        "r3.json",
        r#"{"dim":3,"type":"discrete","points":[[1.0,0.0,0.0]],"weights":[1.0]}"#,
    );
    let out = run(&["distance", onb.to_str().unwrap(), three.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // Tyler needs unit-norm points.
    let off = write(dir.path(), "off.csv", "1.0,0.0\n2.0,0.0\n0.0,1.0\n");
    let out = run(&["tyler", off.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn non_convergence_exits_4() {
    let dir = TempDir::new().unwrap();
    // Anisotropic unit-norm cloud: one Tyler step cannot converge at tol 0.
    let pts = write(
        dir.path(),
        "pts.csv",
        "1.0,0.0\n0.6,0.8\n0.6,-0.8\n0.8,0.6\n",
    );
    let out = run(&[
        "tyler",
        pts.to_str().unwrap(),
        "--tol",
        "0",
        "--max-iter",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn emitted_measures_reingest_byte_identically() {
    let dir = TempDir::new().unwrap();
    let (onb, _, _) = corpus(dir.path());
    let cross = write(
        dir.path(),
        "cross.json",
        r#"{"dim":2,"type":"discrete","points":[[1.0,0.0],[-1.0,0.0],[0.0,1.0],[0.0,-1.0]],"weights":[0.25,0.25,0.25,0.25]}"#,
    );
    let onb = onb.to_str().unwrap();
    let cross = cross.to_str().unwrap();
    for args in [
        vec!["dual", onb],
        vec!["tighten", onb],
        vec!["mix", onb, "--eps", "0.25"],
        vec!["convolve", onb, cross],
        vec!["product", onb, cross],
    ] {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}: {:?}", out.status);
        let text = String::from_utf8(out.stdout).unwrap();
        let measure = pframes::io::measure_from_json(&text).expect("output re-ingests");
        assert_eq!(
            pframes::io::measure_to_json(&measure) + "\n",
            text,
            "{args:?} must round-trip byte-identically"
        );
    }
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = TempDir::new().unwrap();
    let (onb, _, _) = corpus(dir.path());
    let stdout = run(&["potential", onb.to_str().unwrap()]).stdout;
    let file = dir.path().join("report.json");
    let out = bin()
        .args(["potential", onb.to_str().unwrap(), "--out"])
        .arg(&file)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), stdout);
}

#[test]
fn csv_weights_flag_selects_weight_column() {
    let dir = TempDir::new().unwrap();
    let weighted = write(
        dir.path(),
        "weighted.csv",
        "1.0,0.0,0.5\n0.0,1.0,0.25\n0.0,-1.0,0.25\n",
    );
    let out = run(&["analyze", weighted.to_str().unwrap(), "--csv-weights"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["bounds"]["tight"], true);
    assert_eq!(value["bounds"]["lower"], 0.5);

    // Without the flag the third column is a coordinate in R³.
    let out = run(&["analyze", weighted.to_str().unwrap()]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["dim"], 3);
}

#[test]
fn seed_env_var_sets_the_default() {
    let out = bin()
        .args([
            "mc-verify",
            "--spec",
            "bernoulli",
            "--n",
            "2",
            "--m",
            "4",
            "--trials",
            "10",
        ])
        .env("PFRAMES_SEED", "7")
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["seed"], 7);

    // An explicit flag wins over the environment.
    let out = bin()
        .args([
            "mc-verify",
            "--spec",
            "bernoulli",
            "--n",
            "2",
            "--m",
            "4",
            "--trials",
            "10",
            "--seed",
            "9",
        ])
        .env("PFRAMES_SEED", "7")
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["seed"], 9);
}

#[test]
fn bingham_emits_a_bare_scalar() {
    let dir = TempDir::new().unwrap();
    let cross = write(
        dir.path(),
        "cross.csv",
        "1.0,0.0\n-1.0,0.0\n0.0,1.0\n0.0,-1.0\n",
    );
    let out = run(&["bingham", cross.to_str().unwrap()]);
    assert!(out.status.success());
    let value: f64 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(value.abs() < 1e-15);
}
