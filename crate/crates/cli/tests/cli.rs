use std::path::PathBuf;
use std::process::Command;

use ddeuc_cli::ClassifyReport;
use serde_json::Value;

fn systems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples/systems")
}

fn system(name: &str) -> String {
    systems().join(name).display().to_string()
}

fn ddeuc(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_ddeuc")).args(args).output().expect("spawn ddeuc");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

fn json(args: &[&str]) -> Value {
    let (out, err, code) = ddeuc(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn classify_reports_the_class() {
    for (file, class) in [
        ("class1_rank_one.json", "I"),
        ("class1_negative_c.json", "I"),
        ("class2_rotational.json", "II"),
        ("class3_sum.json", "III"),
        ("class3_diff.json", "III"),
    ] {
        let v = json(&["classify", "--input", &system(file)]);
        assert_eq!(v["class"], class, "{file}");
        assert!(v["lemma_checks"].is_object());
    }
}

#[test]
fn classify_without_delay_coupling_is_class_zero_with_note() {
    let v = json(&["classify", "--input", &system("no_delay_coupling.json")]);
    assert_eq!(v["class"], "0");
    let notes = v["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("degenerate")));
}

#[test]
fn classify_output_reingests_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (first, _, code) = ddeuc(&["classify", "--input", &system("class3_sum.json"), "--samples", "801"]);
    assert_eq!(code, 0);
    let path = dir.path().join("verdict.json");
    std::fs::write(&path, &first).unwrap();
    let (second, _, code) = ddeuc(&["classify", "--input", path.to_str().unwrap(), "--samples", "801"]);
    assert_eq!(code, 0);
    assert_eq!(first, second);

    let parsed: ClassifyReport = serde_json::from_str(&first).unwrap();
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", first);
}

#[test]
fn input_errors_exit_one() {
    let (_, err, code) = ddeuc(&["classify", "--input", r#"{"A": [[1]], "B": [[1, 2]]}"#]);
    assert_eq!(code, 1, "{err}");
    let (_, _, code) = ddeuc(&["classify", "--input", "/nonexistent/system.json"]);
    assert_eq!(code, 1);
    let (_, _, code) = ddeuc(&["classify"]);
    assert_eq!(code, 1);
    let (_, _, code) = ddeuc(&["acs", "--input", &system("scalar.json"), "--samples", "10"]);
    assert_eq!(code, 1);
    let (_, _, code) = ddeuc(&["classify", "--input", &system("scalar.json"), "--omega-max", "-2"]);
    assert_eq!(code, 1);
}

#[test]
fn delay_on_a_critical_value_exits_two() {
    let v = json(&["delays", "--input", &system("scalar.json")]);
    let tau0 = v["sequences"][0]["taus"][0].as_f64().unwrap();
    let (_, err, code) = ddeuc(&["delays", "--input", &system("scalar.json"), "--tau", &tau0.to_string()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn delays_reproduce_the_scalar_lattice() {
    let v = json(&["delays", "--input", &system("scalar.json"), "--kmax", "8"]);
    let s = &v["sequences"][0];
    let taus: Vec<f64> = s["taus"].as_array().unwrap().iter().map(|t| t.as_f64().unwrap()).collect();
    assert_eq!(taus.len(), 9);
    for (got, want) in taus.iter().zip([2.4184, 9.6736]) {
        assert!((got - want).abs() < 1e-3);
    }
    assert!((taus[8] - 60.46).abs() < 1e-3);
    assert_eq!(v["unstable_dimension"], 8);

    let v = json(&["delays", "--input", &system("class1_positive_c.json"), "--tau", "0"]);
    assert_eq!(v["unstable_dimension"], 2);
    assert_eq!(v["unstable_dimension_at_zero"], 2);

    let (csv, _, code) = ddeuc(&["delays", "--input", &system("scalar.json"), "--format", "csv", "--kmax", "2"]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("sequence,omega_H,phi_H,direction,k,tau\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn acs_writes_branches_and_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let v = json(&["acs", "--input", &system("scalar.json"), "--out", out]);
    assert_eq!(v["written"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("acs_branches.csv")).unwrap();
    assert!(csv.starts_with("branch_id,omega,gamma,re_Y,im_Y\n"));
    let crossings: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("acs_crossings.json")).unwrap()).unwrap();
    let w = crossings["crossings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["omega_H"].as_f64().unwrap())
        .find(|w| *w > 0.0)
        .unwrap();
    assert!((w - 0.75f64.sqrt()).abs() < 1e-6);

    let v = json(&["acs", "--input", &system("no_delay_coupling.json")]);
    assert_eq!(v["branches"], 0);
    assert_eq!(v["crossings"].as_array().unwrap().len(), 0);
}

#[test]
fn spectrum_counts_and_exports_roots() {
    let v = json(&["spectrum", "--input", &system("class1_rank_one.json"), "--re-min", "-0.3", "--im-max", "4"]);
    assert_eq!(v["unstable_count"], 13);
    let unstable = v["roots"].as_array().unwrap().iter().filter(|r| r["re"].as_f64().unwrap() > 0.0).count();
    assert_eq!(unstable, 13);
    assert!(v["acs_distance"].as_f64().unwrap() < 0.1);

    let (csv, _, code) = ddeuc(&["spectrum", "--input", &system("no_delay_coupling.json"), "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re,im,residual"));
    let ims: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    // eigenvalues of A: -0.75 +- i sqrt(5.9375)
    assert_eq!(ims.len(), 2);
    assert!(ims.iter().all(|w| (w.abs() - 5.9375f64.sqrt()).abs() < 1e-9));
    let v = json(&["spectrum", "--input", &system("no_delay_coupling.json")]);
    assert!(v["acs_distance"].is_null());

    let (_, _, code) = ddeuc(&["spectrum", "--input", &system("class1_negative_c.json")]);
    assert_eq!(code, 1);
}

#[test]
fn stuart_landau_outputs() {
    let v = json(&["sl", "--alpha", "0", "--beta", "2", "--kmax", "2"]);
    assert!((v["hopf"]["destabilizing"]["omega_H"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((v["hopf"]["stabilizing"]["omega_H"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let v = json(&["sl", "--alpha", "0.8", "--beta", "2", "--kmax", "4", "--tau", "2", "--out", out]);
    assert_eq!(v["written"].as_array().unwrap().len(), 3);
    let csv = std::fs::read_to_string(dir.path().join("sl_branches.csv")).unwrap();
    assert!(csv.starts_with("k,phi,a,tau,omega,component_id\n"));
    let traj = std::fs::read_to_string(dir.path().join("sl_trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,re_z,im_z,abs_z\n"));

    let v = json(&["sl", "--alpha", "1.8", "--beta", "1"]);
    assert!(v["hopf"]["destabilizing"].is_null());
    assert_eq!(v["bridges"], 0);
    let v = json(&["sl", "--alpha", "0.8", "--beta", "1"]);
    assert_eq!(v["disconnected"], true);

    let (_, _, code) = ddeuc(&["sl", "--alpha", "0.8", "--beta", "1", "--tau", "2", "--dt", "0.5"]);
    assert_eq!(code, 1);
}

#[test]
fn verify_is_seeded() {
    let args = ["verify", "--seed", "7", "--instances", "6"];
    let (a, _, code) = ddeuc(&args);
    assert_eq!(code, 0, "{a}");
    let (b, _, _) = ddeuc(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 7);
    let (table, _, _) = ddeuc(&["verify", "--seed", "7", "--instances", "6", "--format", "csv"]);
    assert!(table.lines().skip(1).all(|l| l.starts_with("    ") || l.ends_with("PASS")), "{table}");
}
