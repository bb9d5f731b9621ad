//! End-to-end tests of the stgeo binary: exit codes, worked examples,
//! manifests and byte-level determinism across thread counts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stgeo::codebook::{Codebook, Space};
use stgeo::linalg::CMat;
use stgeo::manifold::StiefelFrame;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stgeo"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn unit_frame(t: usize, cols: &[usize]) -> StiefelFrame {
    let mut m = CMat::zeros(t, cols.len());
    for (j, &row) in cols.iter().enumerate() {
        m[(row, j)] = num_complex::Complex64::new(1.0, 0.0);
    }
    StiefelFrame::new(m).unwrap()
}

fn write_orthogonal_pair(dir: &Path) -> PathBuf {
    let book = Codebook::new(
        Space::Grassmann,
        vec![unit_frame(4, &[0, 1]), unit_frame(4, &[2, 3])],
        "orthogonal-planes".into(),
    )
    .unwrap();
    let path = dir.join("ortho.json");
    book.store(&path).unwrap();
    path
}

fn write_phase_unitary(dir: &Path) -> PathBuf {
    let eye = CMat::identity(2);
    let i_eye = eye.scale(num_complex::Complex64::new(0.0, 1.0));
    let book = Codebook::new(
        Space::Unitary,
        vec![
            StiefelFrame::new(eye).unwrap(),
            StiefelFrame::new(i_eye).unwrap(),
        ],
        "phases".into(),
    )
    .unwrap();
    let path = dir.join("phases.json");
    book.store(&path).unwrap();
    path
}

fn csv_value(csv: &str, quantity: &str, index: &str) -> String {
    for line in csv.lines().skip(1) {
        let mut parts = line.splitn(3, ',');
        let q = parts.next().unwrap_or("");
        let idx = parts.next().unwrap_or("");
        let v = parts.next().unwrap_or("");
        if q == quantity && idx == index {
            return v.to_string();
        }
    }
    panic!("quantity {quantity} index {index} not found in:\n{csv}");
}

#[test]
fn analyze_reports_min_chordal_distance() {
    let dir = tempfile::tempdir().unwrap();
    let book = write_orthogonal_pair(dir.path());
    let out = run_in(dir.path(), &["analyze", book.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = stdout_str(&out);
    let d_sq: f64 = csv_value(&csv, "min_dsum_sq", "").parse().unwrap();
    assert!((d_sq - 2.0).abs() < 1e-9, "min d̲² = {d_sq}");
    assert_eq!(csv_value(&csv, "channel", ""), "noncoherent");
}

#[test]
fn extremal_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "extremal",
            "--k",
            "2",
            "--delta",
            "1",
            "--which",
            "max-prod-on-sum",
        ],
    );
    assert!(out.status.success());
    let csv = stdout_str(&out);
    let row = csv.lines().nth(1).expect("one data row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[2], "max-prod-on-sum");
    let closed: f64 = fields[3].parse().unwrap();
    let oracle: f64 = fields[4].parse().unwrap();
    assert!((closed - 0.25).abs() < 1e-15);
    assert!((oracle - 0.25).abs() < 1e-3);
}

#[test]
fn compose_then_analyze_reports_min_s1() {
    let dir = tempfile::tempdir().unwrap();
    let cg = write_orthogonal_pair(dir.path());
    let cu = write_phase_unitary(dir.path());
    let composed = dir.path().join("composed.json");
    let out = run_in(
        dir.path(),
        &[
            "compose",
            cg.to_str().unwrap(),
            cu.to_str().unwrap(),
            "-o",
            composed.to_str().unwrap(),
            "--verify",
            "--rho",
            "4",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout_str(&out);
    assert_eq!(csv_value(&csv, "holds", ""), "true");
    assert_eq!(csv_value(&csv, "size", ""), "4");

    let out = run_in(
        dir.path(),
        &[
            "analyze",
            composed.to_str().unwrap(),
            "--channel",
            "coherent",
            "--rho",
            "4",
        ],
    );
    assert!(out.status.success());
    let csv = stdout_str(&out);
    let min_s1: f64 = csv_value(&csv, "min_s", "1").parse().unwrap();
    assert!((min_s1 - 4.0).abs() < 1e-9, "min s̄_1 = {min_s1}");
}

#[test]
fn unknown_flag_exits_64_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["extremal", "--k", "2", "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.to_lowercase().contains("usage"), "stderr: {err}");
}

#[test]
fn missing_seed_exits_64() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "pack", "--space", "grassmann", "--T", "4", "--k", "2", "--N", "2",
        ],
    );
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn missing_file_exits_66() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["analyze", "no-such-file.json"]);
    assert_eq!(out.status.code(), Some(66));
}

#[test]
fn invariant_violation_exits_2_naming_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"space":"stiefel","T":2,"k":1,"symbols":[[[[1.0,0.0]],[[1.0,0.0]]]]}"#,
    )
    .unwrap();
    let out = run_in(dir.path(), &["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("symbol 0"), "stderr: {err}");
}

#[test]
fn validation_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let book = write_orthogonal_pair(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "pep",
            book.to_str().unwrap(),
            "--i",
            "0",
            "--j",
            "0",
            "--rho",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pack_writes_codebook_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("packed.json");
    let out = run_in(
        dir.path(),
        &[
            "pack",
            "--space",
            "grassmann",
            "--T",
            "4",
            "--k",
            "2",
            "--N",
            "2",
            "--seed",
            "5",
            "--restarts",
            "4",
            "--iterations",
            "1500",
            "-o",
            out_path.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let book = Codebook::load(&out_path).unwrap();
    assert_eq!(book.len(), 2);

    let manifest_path = dir.path().join("packed.json.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "pack");
    assert_eq!(manifest["seed"], 5);
    assert!(manifest["finished_unix"].as_f64().unwrap() >= manifest["started_unix"].as_f64().unwrap());

    // stdout carries the summary CSV
    let csv = stdout_str(&out);
    assert!(csv.starts_with("T,N,min_dsum,min_dprod\n"));
}

#[test]
fn byte_identical_reruns_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let book = write_orthogonal_pair(dir.path());

    // pack to files under different thread counts
    for (name, threads) in [("a.json", "1"), ("b.json", "3")] {
        let out = run_in(
            dir.path(),
            &[
                "pack",
                "--space",
                "stiefel",
                "--T",
                "3",
                "--k",
                "1",
                "--N",
                "3",
                "--seed",
                "42",
                "--restarts",
                "4",
                "--iterations",
                "1200",
                "--threads",
                threads,
                "-o",
                name,
            ],
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b, "pack output depends on thread count");

    // simulate on stdout, rerun with different threads
    let args = [
        "simulate",
        book.to_str().unwrap(),
        "--rho",
        "1,4",
        "--trials",
        "4000",
        "--seed",
        "9",
    ];
    let run1 = run_in(dir.path(), &{
        let mut v = args.to_vec();
        v.extend(["--threads", "1"]);
        v
    });
    let run2 = run_in(dir.path(), &{
        let mut v = args.to_vec();
        v.extend(["--threads", "4"]);
        v
    });
    assert!(run1.status.success() && run2.status.success());
    assert_eq!(run1.stdout, run2.stdout, "simulate output depends on threads");

    // scaling CSV without --timing is deterministic too
    let scale_args = [
        "scaling",
        "--k",
        "1",
        "--rate",
        "0.5",
        "--Tlist",
        "2,4",
        "--seed",
        "7",
        "--restarts",
        "3",
        "--iterations",
        "800",
    ];
    let s1 = run_in(dir.path(), &{
        let mut v = scale_args.to_vec();
        v.extend(["--threads", "1"]);
        v
    });
    let s2 = run_in(dir.path(), &{
        let mut v = scale_args.to_vec();
        v.extend(["--threads", "2"]);
        v
    });
    assert!(s1.status.success() && s2.status.success());
    assert_eq!(s1.stdout, s2.stdout, "scaling output depends on threads");
    assert!(stdout_str(&s1).contains("# nondecreasing="));
}

#[test]
fn simulate_respects_env_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let book = write_orthogonal_pair(dir.path());
    let base = bin()
        .args([
            "simulate",
            book.to_str().unwrap(),
            "--rho",
            "2",
            "--trials",
            "2000",
            "--seed",
            "1",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    let capped = bin()
        .args([
            "simulate",
            book.to_str().unwrap(),
            "--rho",
            "2",
            "--trials",
            "2000",
            "--seed",
            "1",
        ])
        .env("STGEO_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(base.status.success() && capped.status.success());
    assert_eq!(base.stdout, capped.stdout);
}

#[test]
fn help_exits_zero_and_documents_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["simulate", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("rho,trials,bler,stderr,union_bound,chernov_sum"));
}
