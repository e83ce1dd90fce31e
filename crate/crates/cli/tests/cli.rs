use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_thermofock"));
    c.env_remove("THERMOFOCK_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows as column name → values.
fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn floats(csv: &str, name: &str) -> Vec<f64> {
    column(csv, name).iter().map(|s| s.parse().unwrap()).collect()
}

fn summary(csv: &str, key: &str) -> String {
    let prefix = format!("# summary {key} = ");
    csv.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no summary {key}")).to_string()
}

fn config_value(csv: &str, key: &str) -> String {
    let prefix = format!("# config {key} = ");
    csv.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn fock_defects_are_below_tolerance() {
    let csv = stdout(&["fock", "--nmax", "12"]);
    assert!(floats(&csv, "defect").iter().all(|&d| d < 1e-9));
    assert_eq!(column(&csv, "check").iter().filter(|c| *c == "orthonormality").count(), 13 * 13);
    assert_eq!(column(&csv, "check").iter().filter(|c| *c == "kernel").count(), 25);
}

#[test]
fn toy_gap_at_step_two_is_one_half() {
    let csv = stdout(&["toy", "--steps", "2"]);
    assert_eq!(floats(&csv, "gap"), vec![0.0, 0.0, 0.5]);
    assert_eq!(summary(&csv, "certificate_verified"), "true");
}

#[test]
fn spectrum_endpoints_match_closed_forms() {
    let csv = stdout(&["spectrum", "--tmin", "0.01", "--tmax", "10"]);
    let x = floats(&csv, "x");
    let rj = floats(&csv, "planck_over_rayleigh_jeans");
    let w = floats(&csv, "planck_over_wien");
    assert_eq!((x[0], *x.last().unwrap()), (0.01, 10.0));
    // x/(e^x − 1) and 1/(1 − e^{−x}) evaluated independently
    assert!((rj[0] - 0.01 / 0.01f64.exp_m1()).abs() < 1e-15);
    assert!((w.last().unwrap() - 1.0 / -(-10.0f64).exp_m1()).abs() < 1e-15);
    assert!((rj[0] - 0.995).abs() < 1e-4 && (w.last().unwrap() - 1.0000454).abs() < 1e-7);
}

#[test]
fn every_table_names_what_it_exercises() {
    for args in [
        vec!["fock", "--nmax", "3"],
        vec!["sphere", "--samples", "2000"],
        vec!["spectrum"],
        vec!["chain", "--sites", "8"],
        vec!["chain", "--experiment", "equipartition", "--sites", "8", "--samples", "100"],
        vec!["chain", "--experiment", "continuum"],
        vec!["chain", "--experiment", "nonrel"],
        vec!["chain", "--experiment", "energy", "--sites", "8", "--steps", "100"],
        vec!["charfn", "--state", "hermite", "--n", "2"],
        vec!["states"],
        vec!["states", "--experiment", "exotic"],
        vec!["states", "--experiment", "singlet"],
        vec!["states", "--experiment", "circle"],
        vec!["measure", "--samples", "1000"],
        vec!["toy"],
    ] {
        let csv = stdout(&args);
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with(&format!("# thermofock {} ", args[0])));
        let describes = lines.next().unwrap();
        assert!(describes.starts_with("# ") && describes.len() > 10, "{args:?}");
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        let width = header.split(',').count();
        for row in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
            assert_eq!(row.split(',').count(), width, "{args:?}: {row}");
        }
    }
}

#[test]
fn output_is_byte_identical_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["measure", "--samples", "5000", "--seed", "11"];
    for p in [&a, &b] {
        let out = bin().args(args).args(["--out", p.to_str().unwrap()]).output().unwrap();
        assert!(out.status.success() && out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = stdout(&["measure", "--samples", "5000", "--seed", "12"]);
    assert_ne!(std::fs::read_to_string(&a).unwrap(), other);
}

#[test]
fn environment_seed_is_a_fallback() {
    let from_env = bin().env("THERMOFOCK_SEED", "99").args(["toy"]).output().unwrap();
    assert_eq!(config_value(&String::from_utf8(from_env.stdout).unwrap(), "seed"), "99");
    let flag = bin().env("THERMOFOCK_SEED", "99").args(["toy", "--seed", "4"]).output().unwrap();
    assert_eq!(config_value(&String::from_utf8(flag.stdout).unwrap(), "seed"), "4");
}

#[test]
fn flag_overrides_file_overrides_default() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.toml", "beta = 1\nsamples = 2000\n");
    let three = write(dir.path(), "three.toml", "beta = 3\nsamples = 2000\n");
    let flagged = stdout(&["sphere", "--config", &one, "--beta", "2"]);
    assert_eq!(config_value(&flagged, "beta"), "2.0");
    assert_eq!(config_value(&flagged, "samples"), "2000");
    assert_eq!(config_value(&stdout(&["sphere", "--config", &three]), "beta"), "3.0");
    assert_eq!(config_value(&stdout(&["sphere", "--samples", "2000"]), "beta"), "1.0");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = run(&["fock", "--bogus", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(run(&["fock", "--nmax", "x"]).status.code(), Some(2));
    assert_eq!(run(&["toy", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["chain", "--experiment", "nope"]).status.code(), Some(2));

    let malformed = write(dir.path(), "bad.toml", "beta = 1\n\nsamples = = 3\n");
    let out = run(&["sphere", "--config", &malformed]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml:3"), "{}", String::from_utf8_lossy(&out.stderr));

    let unknown = write(dir.path(), "unknown.toml", "beta = 1\nradius_typo = 2\n");
    let out = run(&["sphere", "--config", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown.toml:2") && err.contains("radius_typo"), "{err}");
}

#[test]
fn numerical_guards_exit_with_three() {
    let out = run(&["chain", "--experiment", "nonrel", "--packet-mass", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&out.stderr).trim().is_empty());
    assert_eq!(run(&["chain", "--experiment", "energy", "--dt", "10"]).status.code(), Some(3));
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&["toy"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&["toy", "--format", "json"])).unwrap();
    assert_eq!(json["columns"][5], "gap");
    let gaps: Vec<f64> = json["rows"].as_array().unwrap().iter().map(|r| r[5].as_f64().unwrap()).collect();
    assert_eq!(gaps, floats(&csv, "gap"));
    assert_eq!(json["config"]["steps"], "2");
}

#[test]
fn help_shows_defaults() {
    let help = stdout(&["chain", "--help"]);
    assert!(help.contains("--packet-mass") && help.contains("[default: 100]"));
    assert!(help.contains("--seed") && help.contains("THERMOFOCK_SEED"));
}

#[test]
fn failed_run_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    let out = bin().args(["chain", "--experiment", "nonrel", "--packet-mass", "1", "--out"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!p.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
