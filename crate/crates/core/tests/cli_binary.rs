//! End-to-end runs of the `partial-zeta` binary.

use std::path::Path;
use std::process::{Command, Output};

use partial_zeta::evaluator::scan_min_modulus;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partial-zeta")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Replaces every `seconds` field so two reports can be compared.
fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            if let Some(s) = map.get_mut("seconds") {
                *s = serde_json::Value::Null;
            }
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn verify_trivial_n_exits_zero_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let o = bin(&["verify", "--n", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("N=1") && stdout.contains("NoZeros"), "{stdout}");
    let v = read_json(&out);
    assert_eq!(v["reports"][0]["verdict"], "NoZeros");
    assert_eq!(v["config"]["n_values"], serde_json::json!([1]));
    assert_eq!(v["reports"][0]["slices"].as_array().unwrap().len(), 16);
}

#[test]
fn both_formats_use_the_out_stem() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("report.txt");
    let o = bin(&["verify", "--n", "10,12", "--format", "both", "--out", stem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,slice_lo,slice_hi,depth,boxes,coverage_pct"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[..4], ["10", "1.0", "1.0000152587890625", "1"]);
    assert!(csv.lines().any(|l| l.starts_with("12,")));
    let v = read_json(&dir.path().join("report.json"));
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn csv_only_writes_no_json() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("r");
    let o = bin(&["verify", "--n", "5", "--format", "csv", "--out", stem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("r.csv").exists());
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn reports_are_reproducible_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = bin(&["verify", "--n", "17", "--workers", workers, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let mut v = read_json(&out);
        strip_timing(&mut v);
        v["config"]["workers"] = serde_json::Value::Null;
        v["config"]["output_path"] = serde_json::Value::Null;
        v
    };
    assert_eq!(run("a.json", "1"), run("b.json", "3"));
}

#[test]
fn negative_control_does_not_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n19.json");
    let o = bin(&["verify", "--n", "19", "--out", out.to_str().unwrap()]);
    let code = o.status.code().unwrap();
    assert!(code == 2 || code == 3, "exit {code}");
    assert_ne!(read_json(&out)["reports"][0]["verdict"], "NoZeros");
}

#[test]
fn budget_exhaustion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let o = bin(&["verify", "--n", "28", "--max-boxes", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let v = read_json(&out);
    assert_eq!(v["reports"][0]["verdict"], "BudgetExhausted");
    assert!(v["reports"][0]["slices"][0]["witness"]["thetas"].is_array());
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("deeper").join("r.json");
    let o = bin(&["verify", "--n", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot write"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(bin(&["verify", "--n", "0"]).status.code(), Some(1));
    assert_eq!(bin(&["verify", "--subdiv", "16,8", "--n", "28", "--out", "/dev/null"]).status.code(), Some(1));
    assert_eq!(bin(&["verify", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(bin(&["scan", "--n", "5", "--sigma", "2:1"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn scan_prints_located_minimum() {
    let o = bin(&["scan", "--n", "2", "--t", "0:10"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("N=2 sigma=") && stdout.contains("modulus="), "{stdout}");
    let o = bin(&["scan", "--n", "1"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("modulus=1e0"));
}

/// |ζ_2| ≥ 1 − 2^-σ ≥ 1/2 on σ ≥ 1; equality at σ = 1, t = π/log 2.
#[test]
fn scan_respects_reverse_triangle_bound() {
    let r = scan_min_modulus(2, (1.0, 1.73), (0.0, 10.0), (50, 500)).unwrap();
    assert!(r.modulus >= 0.5 - 1e-15);
    assert!((r.modulus - 0.5).abs() < 1e-9);
    assert!((r.t - std::f64::consts::PI / 2f64.ln()).abs() < 1e-6);
}

/// Fixture: a zero of ζ_19 located independently (root-finding on the real
/// and imaginary parts) at s ≈ 1.0010955115440767 + 600884.2034277758i.
#[test]
fn scan_finds_a_zero_of_zeta_19() {
    let r = scan_min_modulus(19, (1.0, 1.01), (600_880.0, 600_890.0), (20, 2000)).unwrap();
    assert!(r.modulus < 1e-6, "{r:?}");
    assert!((r.sigma - 1.0010955115440767).abs() < 1e-6, "{r:?}");
    assert!((r.t - 600_884.2034277758).abs() < 1e-6, "{r:?}");
}
