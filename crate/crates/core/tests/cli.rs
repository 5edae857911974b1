//! End-to-end tests of the `hardcore` binary. Golden files live in
//! `tests/golden`; regenerate them with `UPDATE_GOLDEN=1 cargo test --test cli`.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardcore"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Fields equal as text, or as numbers to 1e-9 relative.
fn fields_match(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= 1e-9 * x.abs().max(y.abs()),
        _ => false,
    }
}

fn manifest_without_version(line: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(line.trim_start_matches("# ")).unwrap();
    v.as_object_mut().unwrap().remove("version");
    v
}

fn check_golden(name: &str, args: &[&str]) {
    let actual = stdout(args);
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let (a_lines, e_lines): (Vec<&str>, Vec<&str>) = (actual.lines().collect(), expected.lines().collect());
    assert_eq!(a_lines.len(), e_lines.len(), "{name}: line count");
    assert_eq!(manifest_without_version(a_lines[0]), manifest_without_version(e_lines[0]), "{name}: manifest");
    assert_eq!(a_lines[1], e_lines[1], "{name}: header");
    for (a, e) in a_lines[2..].iter().zip(&e_lines[2..]) {
        let (af, ef): (Vec<&str>, Vec<&str>) = (a.split(',').collect(), e.split(',').collect());
        assert_eq!(af.len(), ef.len(), "{name}: row width in {a}");
        for (x, y) in af.iter().zip(&ef) {
            assert!(fields_match(x, y), "{name}: {x} != {y} in row {a}");
        }
    }
}

#[test]
fn golden_intensity() {
    check_golden("intensity.csv", &["intensity", "--lambda-p", "2", "--delta", "0.5", "--process", "matern2"]);
}

#[test]
fn golden_vunion() {
    check_golden("vunion.csv", &["vunion", "--delta", "1", "--steps", "5"]);
}

#[test]
fn golden_kfun() {
    check_golden("kfun.csv", &["kfun", "--lambda-p", "2", "--delta", "1", "--r", "0.5,1,1.5,2,4"]);
}

#[test]
fn golden_interference() {
    check_golden("interference.csv", &["interference", "--lambda-p", "1", "--delta", "1", "--alpha", "3"]);
}

#[test]
fn golden_eir() {
    check_golden("eir.csv", &["eir", "--process", "matern1", "--lambda-p", "2", "--delta", "2", "--alpha", "3"]);
}

#[test]
fn golden_bounds() {
    check_golden("bounds.csv", &["bounds", "--lambda-p", "2", "--delta", "2", "--alpha", "3"]);
}

#[test]
fn golden_bounds_type2() {
    check_golden("bounds_type2.csv", &["bounds", "--alpha", "3", "--type2"]);
}

#[test]
fn golden_figure1() {
    check_golden("figure1.csv", &["figure1", "--lambda-p", "2", "--alpha", "3", "--delta-min", "0.25", "--delta-max", "2", "--steps", "8"]);
}

#[test]
fn golden_sample_schema() {
    check_golden("sample.csv", &["sample", "--process", "matern2", "--lambda-p", "1", "--delta", "1", "--window-radius", "4", "--seed", "7"]);
}

#[test]
fn golden_palm_sample() {
    check_golden("sample_palm.csv", &["sample", "--palm", "--process", "matern1", "--lambda-p", "1", "--delta", "0.5", "--window-radius", "3", "--seed", "7"]);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(2).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn headline_approximation_in_db() {
    let out = stdout(&["eir", "--process", "matern1", "--lambda-p", "2", "--delta", "2", "--alpha", "3", "--method", "approximation"]);
    let db: f64 = csv_rows(&out)[0][5].parse().unwrap();
    assert!((db - 31.5).abs() <= 0.1, "{db}");
}

#[test]
fn type2_bound_in_db() {
    let out = stdout(&["bounds", "--alpha", "3", "--type2"]);
    let rows = csv_rows(&out);
    let row = rows.iter().find(|r| r[0] == "type2_bound").unwrap();
    let db: f64 = row[2].parse().unwrap();
    assert!((db - 0.498).abs() <= 0.005, "{db}");
}

#[test]
fn poisson_eir_is_zero_db() {
    let out = stdout(&["eir", "--process", "poisson", "--delta", "1", "--alpha", "3"]);
    assert_eq!(csv_rows(&out)[0][5], "0");
}

#[test]
fn json_mirrors_csv_rows() {
    let csv = stdout(&["figure1", "--steps", "3"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&["figure1", "--steps", "3", "--format", "json"])).unwrap();
    let rows = json["rows"].as_array().unwrap();
    let header: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(rows.len(), 3);
    for (row, line) in rows.iter().zip(csv_rows(&csv)) {
        let keys: Vec<&str> = row.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, header);
        for (k, v) in header.iter().zip(&line) {
            assert!(fields_match(&row[*k].as_f64().unwrap().to_string(), v) || {
                let x = row[*k].as_f64().unwrap();
                (x - v.parse::<f64>().unwrap()).abs() <= 1e-11 * x.abs()
            });
        }
    }
    assert_eq!(json["manifest"]["command"], "figure1");
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        vec!["eir", "--delta", "0.5", "--r0", "1"],
        vec!["eir", "--alpha", "2"],
        vec!["eir", "--process", "matern2", "--method", "approximation"],
        vec!["intensity", "--lambda-p", "-1"],
        vec!["interference", "--replicates", "10", "--window-radius", "1"],
        vec!["kfun", "--r-min", "2", "--r-max", "1"],
        vec!["figure1", "--delta-min", "0"],
        vec!["sample", "--process", "nope"],
        vec!["--no-such-flag"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unmet_tolerance_exits_3() {
    let out = run(&["eir", "--process", "matern2", "--lambda-p", "2", "--delta", "2", "--rel-tol", "1e-15", "--max-subdivisions", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerance"));
}

#[test]
fn help_exits_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["eir", "--help"]).status.code(), Some(0));
}

#[test]
fn replay_reproduces_monte_carlo_output() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("mc.csv", vec!["interference", "--replicates", "200", "--seed", "17", "--process", "matern2", "--fading", "exponential"]),
        ("k.json", vec!["kfun", "--replicates", "100", "--seed", "3", "--r", "1,2,3", "--format", "json"]),
        ("s.csv", vec!["sample", "--palm", "--process", "matern2", "--seed", "9", "--window-radius", "4"]),
    ] {
        let first = dir.path().join(name);
        let mut a = args.clone();
        a.extend(["--out", first.to_str().unwrap()]);
        assert!(run(&a).status.success());

        let check = run(&["replay", "--check", first.to_str().unwrap()]);
        assert_eq!(check.status.code(), Some(0), "{}", String::from_utf8_lossy(&check.stderr));

        let again = stdout(&["replay", first.to_str().unwrap()]);
        assert_eq!(again.as_bytes(), std::fs::read(&first).unwrap().as_slice());
    }
}

#[test]
fn replay_check_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.csv");
    assert!(run(&["interference", "--replicates", "50", "--out", file.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replacen("monte_carlo,", "monte_carlo,1", 1)).unwrap();
    assert_eq!(run(&["replay", "--check", file.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&file, "not a manifest\n").unwrap();
    assert_eq!(run(&["replay", file.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn duration_goes_to_stderr_only() {
    let out = run(&["intensity"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("duration_s"));
    assert!(!String::from_utf8(out.stdout).unwrap().contains("duration_s"));
}
