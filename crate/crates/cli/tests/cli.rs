use std::path::Path;
use std::process::Command;

use cpm_core::classical::{canonical_from_vectors, pauli_basis, MatrixBasis};
use cpm_core::rng::{orthonormal_vectors, rng_from_seed};
use cpm_workbench::formats::{to_json, write, BasisFile};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cpm_workbench::run(std::iter::once("cpm-workbench").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn save(dir: &Path, name: &str, basis: &MatrixBasis) -> String {
    let path = dir.join(name);
    BasisFile::new(basis).save(&path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_basis_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let canonical = canonical_from_vectors(&orthonormal_vectors(&mut rng_from_seed(3), 3), 1e-12).unwrap();
    let (code, text, _) = run(&["check-basis", "--input", &save(dir.path(), "c.json", &canonical)]);
    assert_eq!(code, 0, "{text}");
    assert!(!text.contains("FAIL"));

    let (code, text, _) = run(&["check-basis", "--input", &save(dir.path(), "p.json", &pauli_basis()), "--format", "json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["body"]["min_choi_eigenvalue"].as_f64().unwrap() < 0.0);
    assert_eq!(v["format_version"], 1);
}

#[test]
fn malformed_and_invalid_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = to_json(&BasisFile::new(&pauli_basis())).unwrap();
    let truncated = dir.path().join("t.json");
    write(&truncated, &text[..text.len() - 40]).unwrap();
    assert_eq!(run(&["check-basis", "--input", truncated.to_str().unwrap()]).0, 64);

    // Scale one element: no longer orthonormal.
    let mut el = pauli_basis().elements().to_vec();
    el[2] = el[2].scale_real(2.0);
    let skewed = MatrixBasis::new_unvalidated(el).unwrap();
    let path = save(dir.path(), "s.json", &skewed);
    assert_eq!(run(&["check-basis", "--input", &path]).0, 65);
    let (code, _, _) = run(&["check-basis", "--input", &path, "--no-validate"]);
    assert!(code == 0 || code == 1 || code == 2);

    assert_eq!(run(&["check-basis", "--input", "/nonexistent/basis.json"]).0, 74);
    assert_eq!(run(&["search", "--n", "5", "--out", "x.json"]).0, 64);
    assert_eq!(run(&["rel-enumerate", "--size", "4", "--out", "x.json"]).0, 64);
}

#[test]
fn search_bodies_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(format!("s{w}.json"));
        let (code, _, _) = run(&["search", "--n", "3", "--trials", "50", "--seed", "4", "--workers", w, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        bodies.push((v["body"].to_string(), v["manifest"]["result_digest"].clone()));
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn rel_enumerate_budget_and_success() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let out = out.to_str().unwrap();
    let (code, text, _) = run(&["rel-enumerate", "--size", "1", "--out", out]);
    assert_eq!(code, 0);
    assert!(text.contains("1 survivors"));
    let (code, _, err) = run(&["rel-enumerate", "--size", "2", "--cap", "20", "--out", out]);
    assert_eq!(code, 75);
    assert!(err.contains("--start-partition"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["body"]["incomplete"]["next_partition"].as_u64().unwrap() > 0);
}

#[test]
fn metrology_commands() {
    let (code, csv, err) = run(&["metrology", "sweep", "--m", "2", "--steps", "5"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "phi,p_parallel,p_sequential,fisher");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].ends_with(','));
    assert!(err.contains("fringe_amplitude"));
    assert!(!csv.contains('\r'));

    assert_eq!(run(&["metrology", "sweep", "--m", "2", "--weights", "0.5,0.6"]).0, 64);
    assert_eq!(run(&["metrology", "sweep", "--m", "2", "--steps", "2"]).0, 64);

    let (code, text, _) = run(&["metrology", "verify", "--n", "2", "--m", "3", "--phases", "0,0.3", "--weights", "0.8,0.2"]);
    assert_eq!(code, 0);
    assert!(text.contains("PASS"));
}

#[test]
fn incompatible_map_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let path = dir.path().join("map.json");
    let json = format!(
        r#"{{"format_version": 1, "kraus": [[[[{h}, 0], [{h}, 0]], [[{h}, 0], [{n}, 0]]]]}}"#,
        n = -h
    );
    write(&path, &json).unwrap();
    let (code, _, err) = run(&["metrology", "verify", "--n", "2", "--m", "2", "--map", path.to_str().unwrap()]);
    assert_eq!(code, 65, "{err}");
    assert!(err.contains("map 0"));
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cpm-workbench");
    let out = Command::new(bin).arg("pauli-demo").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("NOT completely positive"));
    let out = Command::new(bin).args(["rel-enumerate", "--size", "9", "--out", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}
