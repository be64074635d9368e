use std::fs;
use std::process::Command;

use serde_json::Value;

fn fockext(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fockext"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = fockext(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn constants_csv_has_schema_and_identity_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let r = report(&["constants", "--j", "-4..4", "--s", "0.1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(r["command"], "constants");
    assert_eq!(r["config"]["j"], "-4..4");
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# fockext-schema v1"));
    assert!(lines.next().unwrap().ends_with("identity_residual"));
    assert_eq!(lines.count(), 9);
    assert!(r["results"]["max_identity_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let args = ["density", "--curve", "crossing", "--radii", "2,4", "--centers", "0,0,0,0;1,0,0,0", "--n-mc", "400"];
    let (_, a, _) = fockext(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_fockext"))
        .args(args)
        .env("FOCKEXT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.as_bytes(), &b.stdout[..]);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert!(v["diagnostics"]["runtime"].is_null());
    assert_eq!(v["diagnostics"]["seed"], 7);
}

#[test]
fn seed_changes_monte_carlo_output() {
    let run = |seed: &str| {
        report(&["density", "--curve", "sine", "--radii", "2", "--centers", "0,0,3.14,0", "--n-mc", "300", "--seed", seed])
    };
    let (a, b) = (run("1"), run("2"));
    assert_ne!(a["results"], b["results"]);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let (code, _, _) = fockext(&[
        "counterexample", "--k", "2..5", "--mode", "truncated", "--degree", "30",
        "--json", first.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (_, again, _) = fockext(&["counterexample", "--config", first.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(&first).unwrap(), again);

    let kv = dir.path().join("run.cfg");
    fs::write(&kv, "# comb sweep\nk = 1..3\nthreshold = 10\n").unwrap();
    let r = report(&["counterexample", "--config", kv.to_str().unwrap(), "--k", "1..4"]);
    assert_eq!(r["config"]["k"], "1..4");
    assert_eq!(r["results"]["growth"]["exceeds_from"], 2);
}

#[test]
fn counterexample_kernel_growth() {
    let r = report(&["counterexample", "--k", "1..8", "--mode", "kernel"]);
    let rows = r["results"]["growth"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let v1 = rows[0]["min_norm_sq"].as_f64().unwrap();
    let e = std::f64::consts::E;
    assert!((v1 - std::f64::consts::PI * e / (e - 1.0)).abs() < 1e-12);
    assert_eq!(r["results"]["growth"]["increasing"], true);
}

#[test]
fn sine_flatness_radius_shrinks_with_window() {
    let radius = |n: &str| {
        report(&["flatness", "--curve", "sine", "--nmax", n, "--n-mc", "200"])["results"]["tubular_radius"]
            .as_f64()
            .unwrap()
    };
    assert!(radius("20") < radius("2"));
}

#[test]
fn crossing_example_reproduces_data() {
    let r = report(&["crossing", "--example"]);
    for v in r["results"]["extension"]["branch_residuals"].as_array().unwrap() {
        assert!(v.as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn extend_commands_report_bounds() {
    let m = report(&["extend-model", "--s", "0.05", "--n", "6"]);
    assert_eq!(m["results"]["holds"], true);
    let c = report(&["extend-model", "--s", "0.05", "--eps", "0.4", "--c", "1,0,0,-1"]);
    assert_eq!(c["results"]["extension"]["holds"], true);
    let e = report(&["extend-min", "--curve", "model", "--kernel"]);
    let ext = &e["results"]["extension"];
    assert!(ext["datum_residual"].as_f64().unwrap() <= 1e-8);
    assert!(ext["fock_norm_sqr"].as_f64().unwrap() >= e["results"]["kernel_norm_sqr"].as_f64().unwrap() * (1.0 - 1e-9));
}

#[test]
fn extend_min_reads_constraint_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    fs::write(&path, "x_re,x_im,y_re,y_im,v_re,v_im\n0,0,0,0,1,0\n1,0,0,0,0,0\n0,0,1,0,2,0\n").unwrap();
    let r = report(&["extend-min", "--constraints", path.to_str().unwrap(), "--degree", "2"]);
    assert!(r["results"]["extension"]["datum_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn exit_codes() {
    assert_eq!(fockext(&["nonsense"]).0, 1);
    assert_eq!(fockext(&["density", "--curve", "hexagon"]).0, 1);
    assert_eq!(fockext(&["constants", "--j", "4..1"]).0, 1);
    assert_eq!(fockext(&["--help"]).0, 0);

    let (code, out, _) = fockext(&["extend-model", "--s", "0.5", "--eps", "0.5"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["diagnostics"]["error"].as_str().unwrap().contains("clipping"));
    assert_eq!(v["config"]["eps"], 0.5);

    let (code, _, err) = fockext(&["reproduce", "--only", "1"]);
    assert_eq!(code, 0);
    assert!(err.starts_with("PASS  1"));
    // the j = 0 limit of criterion 2 does not hold as stated
    assert_eq!(fockext(&["reproduce", "--only", "2"]).0, 3);
}
