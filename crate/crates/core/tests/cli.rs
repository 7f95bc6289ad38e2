use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steiner-lab"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> i32 {
    let status = bin().args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap();
    status.status.code().unwrap()
}

const SMALL_GAUSSIAN: &str = r#"{
  "name": "small",
  "case": {"kind": "gaussian_vortex"},
  "grid": {"L": 6, "n": 129},
  "scans": {"radii": {"start": 1, "stop": 5, "count": 9}, "levels": {"start": 0.2, "stop": 0.8, "count": 4}}
}"#;

#[test]
fn malformed_json_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\"name\": \"x\",\n \"case\": ");
    let out = bin().arg("report").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn unknown_field_and_small_grid_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "u.json", r#"{"name": "x", "case": {"kind": "linear"}, "grid": {"L": 4, "n": 65}, "colour": 1}"#);
    assert_eq!(run(&["report"], &unknown, &dir.path().join("o1")), 1);
    let small = write_config(dir.path(), "s.json", r#"{"name": "x", "case": {"kind": "linear"}, "grid": {"L": 4, "n": 33}}"#);
    assert_eq!(run(&["euler"], &small, &dir.path().join("o2")), 1);
}

#[test]
fn out_of_domain_scan_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "r.json",
        r#"{"name": "x", "case": {"kind": "gaussian_vortex"}, "grid": {"L": 4, "n": 65}, "scans": {"radii": {"start": 1, "stop": 9, "count": 3}}}"#,
    );
    assert_eq!(run(&["scan", "--kind", "oscillation"], &cfg, &dir.path().join("o")), 1);
}

#[test]
fn passing_and_failing_scans() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "g.json", SMALL_GAUSSIAN);
    assert_eq!(run(&["scan", "--kind", "oscillation"], &good, &dir.path().join("g")), 0);
    assert!(dir.path().join("g/plots/oscillation.csv").exists());
    let lin = write_config(
        dir.path(),
        "l.json",
        r#"{"name": "lin", "case": {"kind": "linear"}, "grid": {"L": 6, "n": 129}, "scans": {"radii": {"start": 1, "stop": 5, "count": 9}}}"#,
    );
    assert_eq!(run(&["scan", "--kind", "oscillation"], &lin, &dir.path().join("l")), 2);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", SMALL_GAUSSIAN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["report", "--seed", "5"], &cfg, &a), 0);
    assert_eq!(run(&["report", "--seed", "5"], &cfg, &b), 0);
    assert_eq!(fs::read(a.join("records.csv")).unwrap(), fs::read(b.join("records.csv")).unwrap());
    assert!(a.join("report.json").exists());
}

#[test]
fn format_flag_limits_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", SMALL_GAUSSIAN);
    let out = dir.path().join("o");
    let code = bin().args(["scan", "--kind", "annular", "--format", "json", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap().code();
    assert_eq!(code, Some(0));
    assert!(out.join("report.json").exists() && !out.join("records.csv").exists());
}

#[test]
fn seeded_perturbation_breaks_the_euler_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.json",
        r#"{"name": "p", "case": {"kind": "gaussian_vortex"}, "grid": {"L": 6, "n": 257},
            "perturbation": {"amplitude": 0.05, "bumps": 3}, "steps": ["euler"]}"#,
    );
    let out = dir.path().join("o");
    assert_eq!(run(&["report", "--seed", "3"], &cfg, &out), 2);
    let csv = fs::read_to_string(out.join("records.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("euler.bernoulli_residual") && l.contains(",false,")), "{csv}");
}

#[test]
fn bundled_gaussian_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(run(&["report"], &configs().join("gaussian_full.json"), &out), 0);
    let csv = fs::read_to_string(out.join("records.csv")).unwrap();
    let passing = csv.lines().skip(1).filter(|l| l.split(',').nth(4) == Some("true")).count();
    assert!(passing >= 25, "{passing}");
}

#[test]
fn bundled_negative_control_is_inverted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(run(&["report"], &configs().join("twobump_negative.json"), &out), 0);
    let csv = fs::read_to_string(out.join("records.csv")).unwrap();
    for name in ["stagnation.connected", "symmetry.radial", "contour.connected.c=0.5"] {
        let line = csv.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap();
        assert!(line.contains(",false,") && line.ends_with(",true"), "{line}");
    }
}
