use std::process::{Command, Output};

use serde_json::Value;

fn lensgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lensgeo"))
        .args(args)
        .env_remove("LENSGEO_TIE_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn dist_minus_identity_is_two_pi() {
    let v = json(&lensgeo(&["dist", "--alpha", "-1", "0", "--beta", "0", "0"]));
    assert!((v["distance"].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-12);
    assert_eq!(v["is_cut_point"], true);
    assert_eq!(v["solutions"][0]["multiplicity"], "family");
}

#[test]
fn dist_of_identity_is_zero() {
    let v = json(&lensgeo(&["dist", "--abc", "0", "0", "0"]));
    assert_eq!(v["distance"].as_f64().unwrap(), 0.0);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 0);
}

#[test]
fn dist_recovers_forward_constructed_target() {
    // Exp(theta = 0.4, c = 0.9, t = 2.1) via the geodesic command
    let (_, rows) = csv_rows(&lensgeo(&["geodesic", "--theta", "0.4", "--c", "0.9", "--t-max", "2.1", "--n", "2"]));
    let last = &rows[1];
    let v = json(&lensgeo(&["dist", "--alpha", &last[1], &last[2], "--beta", &last[3], &last[4]]));
    assert!((v["distance"].as_f64().unwrap() - 2.1).abs() < 1e-8);
    let sol = &v["solutions"][0];
    assert!((sol["c"].as_f64().unwrap() - 0.9).abs() < 1e-8);
    assert!((sol["theta"].as_f64().unwrap() - 0.4).abs() < 1e-8);
}

#[test]
fn pi_literals_are_accepted() {
    let v = json(&lensgeo(&["dist", "--abc", "pi/2", "0", "-pi/2"]));
    assert!(v["distance"].as_f64().unwrap() > 0.0);
}

#[test]
fn geodesic_rows() {
    let (header, rows) = csv_rows(&lensgeo(&["geodesic", "--theta", "0", "--c", "0", "--t-max", "0", "--n", "2"]));
    assert_eq!(header.join(","), "t,alpha_re,alpha_im,beta_re,beta_im,a,b,c,u1,u2");
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], rows[1]);
    assert_eq!(f(&rows[0][1]), 1.0);

    let (_, rows) = csv_rows(&lensgeo(&["geodesic", "--theta", "0", "--c", "0", "--t-max", "pi", "--n", "3"]));
    assert!(f(&rows[2][1]).abs() < 1e-15);

    let (_, rows) = csv_rows(&lensgeo(&["geodesic", "--theta", "1.3", "--c", "-2.5", "--t-max", "7", "--n", "200"]));
    for r in &rows {
        let x: Vec<f64> = r.iter().map(|s| f(s)).collect();
        assert!(x.iter().all(|v| v.is_finite()));
        assert!((x[1] * x[1] + x[2] * x[2] + x[3] * x[3] + x[4] * x[4] - 1.0).abs() < 1e-12);
        assert!((x[8] * x[8] + x[9] * x[9] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn plan_same_pose_and_rotation() {
    let v = json(&lensgeo(&["plan", "--from", "1", "2", "0.5", "--to", "1", "2", "0.5"]));
    assert_eq!(v["length"].as_f64().unwrap(), 0.0);
    assert_eq!(v["cusps"].as_array().unwrap().len(), 0);

    let v = json(&lensgeo(&["plan", "--from", "pi/2", "0", "0", "--to", "pi/2", "0", "pi/2"]));
    assert!((v["length"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert_eq!(v["solutions_found"], 2);
}

#[test]
fn plan_with_a_cusp() {
    let dir = std::env::temp_dir().join(format!("lensgeo-plan-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("traj.csv");
    let out = lensgeo(&[
        "plan", "--from", "pi/2", "0", "0", "--to", "1", "0", "0.75",
        "--trajectory", path.to_str().unwrap(),
    ]);
    let v = json(&out);
    let cusps = v["cusps"].as_array().unwrap();
    assert_eq!(cusps.len(), 1);

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,a,b,xi,u1,u2,cusp");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    let flagged: Vec<&Vec<String>> = rows.iter().filter(|r| r[6] == "1").collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(f(&flagged[0][0]), cusps[0].as_f64().unwrap());
    let last = rows.last().unwrap();
    assert!((f(&last[1]) - 1.0).abs() < 1e-6);
    assert!((f(&last[3]) - 0.75).abs() < 1e-6);

    let csv = lensgeo(&["--format", "csv", "plan", "--from", "pi/2", "0", "0", "--to", "1", "0", "0.75"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), text);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cutlocus_loc_rows_are_vertical_classes() {
    let (header, rows) = csv_rows(&lensgeo(&["cutlocus", "--mode", "loc", "--grid", "16"]));
    assert_eq!(header.join(","), "a,b,c,stratum,gap,witness1,witness2");
    assert_eq!(rows.len(), 32);
    for r in &rows {
        assert_eq!(r[3], "kloc");
        assert_ne!(r[5], r[6]);
    }
}

#[test]
fn cutlocus_sym_is_deterministic() {
    let args = ["cutlocus", "--mode", "sym", "--grid", "8"];
    let (a, b) = (lensgeo(&args), lensgeo(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (_, rows) = csv_rows(&a);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[3] == "ksym" && f(&r[4]) <= 1e-3));
}

#[test]
fn cutlocus_audit_goes_to_stderr() {
    let out = lensgeo(&["cutlocus", "--mode", "sym", "--grid", "6", "--audit"]);
    assert!(out.status.success());
    let audit: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(audit["max_refined_gap"].as_f64().unwrap() < 1e-5);
    assert!(audit["containment"]["per_representative"].as_array().unwrap().len() == 4);
}

#[test]
fn tolerance_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_lensgeo"))
        .args(["cutlocus", "--mode", "sym", "--grid", "6"])
        .env("LENSGEO_TIE_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_reports_and_is_reproducible() {
    let args = ["oracle", "--trials", "1", "--seed", "7"];
    let a = lensgeo(&args);
    let v = json(&a);
    assert!(v["max_abs_err"].as_f64().unwrap() <= 2e-3);
    assert_eq!(v["failures"], 0);
    assert_eq!(a.stdout, lensgeo(&args).stdout);
}

#[test]
fn oracle_infrastructure_failure_exits_4() {
    let out = lensgeo(&["oracle", "--trials", "1", "--grid", "4", "3", "4"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["dist", "--alpha", "x", "0", "--beta", "0", "0"],
        vec!["dist", "--alpha", "2", "0", "--beta", "0", "0"],
        vec!["dist"],
        vec!["geodesic", "--theta", "0", "--c", "0", "--t-max", "1", "--n", "1"],
        vec!["plan", "--from", "4", "0", "0", "--to", "1", "0", "0"],
        vec!["cutlocus", "--mode", "sym", "--grid", "1"],
        vec!["oracle", "--trials", "0"],
        vec!["--format", "csv", "dist", "--abc", "0", "0", "0"],
    ] {
        assert_eq!(lensgeo(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_path_is_written() {
    let path = std::env::temp_dir().join(format!("lensgeo-dist-{}.json", std::process::id()));
    let out = lensgeo(&["dist", "--abc", "1", "2", "3", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["distance"].as_f64().unwrap() > 0.0);
    std::fs::remove_file(path).ok();
}
