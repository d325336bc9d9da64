//! End-to-end checks of the command surface: documented example outputs,
//! exit codes, replay from a manifest, and artifact schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_tzl"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tzl-ex-{}-{tag}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("spawn tzl")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

#[test]
fn spectrum_disc_p1_prints_the_exact_eigenvalues() {
    let dir = scratch("spectrum");
    let out = run(&["spectrum", "--symbol", "disc:1", "--p", "1"], &dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(&dir, "spectrum.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "j,lambda,log_lambda");
    assert!(lines
        .next()
        .unwrap()
        .starts_with("0,7.5000000000000000e-1,"));
    assert!(lines
        .next()
        .unwrap()
        .starts_with("1,2.5000000000000000e-1,"));
    assert!(lines.next().is_none());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn histogram_writes_all_zeros_and_reruns_byte_identical() {
    let args = [
        "histogram",
        "--symbol",
        "const:1",
        "--p",
        "20",
        "--rn",
        "1000",
        "--seed",
        "7",
    ];
    let dir_a = scratch("hist-a");
    let dir_b = scratch("hist-b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&args, dir);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let zeros = read(&dir_a, "zeros.csv");
    // Header plus one row per zero: 1000 trials x 20 zeros.
    assert_eq!(zeros.lines().count(), 1 + 20 * 1000);
    let hist = read(&dir_a, "hist.csv");
    assert_eq!(
        hist.lines().next().unwrap(),
        "bin_lo,bin_hi,count,density,psi_mid"
    );
    assert_eq!(hist.lines().count(), 1 + 50);

    for name in ["zeros.csv", "hist.csv"] {
        assert_eq!(
            read(&dir_a, name),
            read(&dir_b, name),
            "{name} differs between reruns"
        );
    }
    std::fs::remove_dir_all(&dir_a).ok();
    std::fs::remove_dir_all(&dir_b).ok();
}

#[test]
fn disc_histogram_shows_the_support_gap() {
    let dir = scratch("hist-disc");
    let out = run(
        &[
            "histogram",
            "--symbol",
            "disc:1",
            "--p",
            "20",
            "--rn",
            "200",
            "--seed",
            "3",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value = serde_json::from_str(&read(&dir, "run.json")).unwrap();
    // Zeros concentrate in the disc, so the full-sphere KS stays far from 0.
    let ks = manifest["summary"]["ks_vs_limit"].as_f64().unwrap();
    assert!(ks > 0.05, "global KS {ks} unexpectedly small");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn replaying_the_manifest_reproduces_the_artifacts() {
    let dir_a = scratch("replay-a");
    let out = run(
        &[
            "clt", "--symbol", "const:1", "--p", "15", "--trials", "60", "--seed", "9",
        ],
        &dir_a,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let dir_b = scratch("replay-b");
    let manifest_path = dir_a.join("run.json");
    let out = Command::new(bin())
        .arg("--config")
        .arg(&manifest_path)
        .arg("--out")
        .arg(&dir_b)
        .output()
        .expect("spawn tzl");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    assert_eq!(read(&dir_a, "clt.csv"), read(&dir_b, "clt.csv"));
    std::fs::remove_dir_all(&dir_a).ok();
    std::fs::remove_dir_all(&dir_b).ok();
}

#[test]
fn json_format_emits_schema_checked_objects() {
    let dir = scratch("json");
    let out = run(
        &[
            "spectrum", "--symbol", "power:2", "--p", "3", "--format", "json",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows: serde_json::Value = serde_json::from_str(&read(&dir, "spectrum.json")).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["j"], 0);
    assert!(rows[0]["lambda"].is_number());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn error_exits_are_typed() {
    let dir = scratch("errors");

    // Unknown symbol: precondition, exit 1.
    let out = run(&["spectrum", "--symbol", "gauss:1", "--p", "5"], &dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown symbol"));

    // Degree cap: precondition, exit 1.
    let out = run(&["spectrum", "--symbol", "const:1", "--p", "501"], &dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));

    // Malformed config file: precondition, exit 1.
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"command\":\"spectrum\",\"bogus\":true}").unwrap();
    let out = Command::new(bin())
        .arg("--config")
        .arg(&bad)
        .output()
        .expect("spawn tzl");
    assert_eq!(out.status.code(), Some(1));

    // Missing trial count: precondition, exit 1.
    let out = run(&["clt", "--symbol", "const:1", "--p", "10"], &dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn kernel_check_writes_near_and_far_tables() {
    let dir = scratch("kernel");
    let out = run(
        &[
            "kernel-check",
            "--symbol",
            "const:1",
            "--p-list",
            "50,100",
            "--offsets",
            "0.5,1",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let near = read(&dir, "kernel_near.csv");
    assert_eq!(near.lines().count(), 1 + 2 * 2);
    let far = read(&dir, "kernel_far.csv");
    assert_eq!(far.lines().count(), 1 + 2);
    let manifest: serde_json::Value = serde_json::from_str(&read(&dir, "run.json")).unwrap();
    assert_eq!(manifest["summary"]["far_all_ok"], true);
    std::fs::remove_dir_all(&dir).ok();
}
