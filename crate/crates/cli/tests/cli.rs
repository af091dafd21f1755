use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lownoise"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Runs the binary and returns (exit code, stdout).
fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, text) = run(args);
    (code, serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn close(v: &Value, expected: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() <= tol
}

#[test]
fn validate_exit_codes() {
    let (code, report) = run_json(&["validate", "--channel", "depolarizing"]);
    assert_eq!(code, 0);
    assert_eq!(report["validation"]["passed"], true);

    let bad = fixture("bad_kappa.json");
    let (code, report) = run_json(&["validate", "--channel", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(close(
        &report["validation"]["kappa_norm_defect"],
        1.0,
        1e-15
    ));

    let missing = fixture("missing_file.json");
    assert_eq!(
        run(&["validate", "--channel", missing.to_str().unwrap()]).0,
        2
    );
    assert_eq!(run(&["validate", "--channel", "no_such_channel"]).0, 2);
    assert_eq!(run(&["validate"]).0, 2);
}

#[test]
fn malformed_spec_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let text = std::fs::read_to_string(fixture("bad_kappa.json"))
        .unwrap()
        .replacen("\"kappa\": [1, 0]", "\"kappa\": 7", 1);
    std::fs::write(&path, text).unwrap();
    let out = bin()
        .args(["validate", "--channel", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("b_series[0].kappa"), "{stderr}");
}

#[test]
fn invalid_channel_stops_before_computation() {
    let bad = fixture("bad_kappa.json");
    let (code, report) = run_json(&["fisher", "--channel", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(report.get("fisher").is_none());
}

#[test]
fn fisher_rows() {
    let (code, report) = run_json(&["fisher", "--channel", "depolarizing", "--eps", "1e-2"]);
    assert_eq!(code, 0);
    let row = &report["fisher"]["rows"][0];
    let closed_form = 4.0 / 9.0 * (1.0 / (1.0 - 2.0 * 0.01 / 3.0) + 3.0 / (2.0 * 0.01));
    assert!(close(&row["exact_j"], closed_form, 1e-8 * closed_form));
    assert!(close(
        &report["fisher"]["leading_coefficient"],
        2.0 / 3.0,
        1e-14
    ));

    let (code, report) = run_json(&[
        "fisher",
        "--channel",
        "amplitude_damping",
        "--input",
        "basis:1",
        "--eps",
        "1e-3",
    ]);
    assert_eq!(code, 0);
    let expected = 1.0 / (1e-3 * (1.0 - 1e-3));
    assert!(close(
        &report["fisher"]["rows"][0]["exact_j"],
        expected,
        1e-8 * expected
    ));

    let (code, report) = run_json(&["fisher", "--channel", "identity"]);
    assert_eq!(code, 0);
    for row in report["fisher"]["rows"].as_array().unwrap() {
        assert_eq!(row["exact_j"].as_f64(), Some(0.0));
    }
    assert_eq!(report["fisher"]["leading_coefficient"].as_f64(), Some(0.0));
}

#[test]
fn fisher_with_entangled_input() {
    let (code, report) = run_json(&["fisher", "--channel", "depolarizing", "--input", "maxent"]);
    assert_eq!(code, 0);
    assert_eq!(report["fisher"]["assisted"], true);
    assert!(close(&report["fisher"]["leading_coefficient"], 1.0, 1e-14));
    assert!(close(
        &report["fisher"]["reduced_state_coefficient"],
        1.0,
        1e-14
    ));
    assert!(close(&report["fisher"]["extrapolated"], 1.0, 1e-4));

    let (code, report) = run_json(&["fisher", "--channel", "phase_flip", "--input", "1:0, 0:1"]);
    assert_eq!(code, 0);
    assert!(close(&report["fisher"]["leading_coefficient"], 1.0, 1e-14));

    assert_eq!(
        run(&["fisher", "--channel", "depolarizing", "--input", "1:0,2"]).0,
        2
    );
    assert_eq!(
        run(&["fisher", "--channel", "depolarizing", "--input", "basis:5"]).0,
        2
    );
    assert_eq!(
        run(&["fisher", "--channel", "depolarizing", "--eps", "0"]).0,
        2
    );
}

#[test]
fn optimize_ratios() {
    let ratio = |channel: &str| {
        let (code, report) = run_json(&["optimize", "--channel", channel, "--starts", "8"]);
        assert_eq!(code, 0);
        report["optimization"]["enhancement"]["ratio"].clone()
    };
    assert!(close(&ratio("depolarizing"), 1.5, 1e-9));
    assert!(close(&ratio("amplitude_damping"), 1.0, 1e-9));
    assert!(ratio("identity").is_null());
}

#[test]
fn nbody_reports() {
    for (n, expected) in [("2", 2.0), ("3", 3.0)] {
        let (code, report) = run_json(&[
            "nbody",
            "--channel",
            "depolarizing",
            "--n",
            n,
            "--trials",
            "200",
        ]);
        assert_eq!(code, 0);
        assert!(close(
            &report["nbody"]["factorized"]["value"],
            expected,
            1e-9
        ));
        assert_eq!(report["nbody"]["no_gain"]["violations"].as_u64(), Some(0));
    }
    assert_eq!(
        run(&["nbody", "--channel", "depolarizing", "--n", "1"]).0,
        2
    );
}

fn strip_metadata(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("metadata");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn nbody_runs_are_deterministic() {
    let args = [
        "nbody",
        "--channel",
        "random_lownoise:3",
        "--n",
        "3",
        "--trials",
        "50",
        "--seed",
        "11",
    ];
    let (_, a) = run(&args);
    let (_, b) = run(&args);
    assert_eq!(strip_metadata(&a), strip_metadata(&b));
}

#[test]
fn csv_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("r.json");
    let csv_path = dir.path().join("r.csv");
    let base = [
        "fisher",
        "--channel",
        "amplitude_damping",
        "--input",
        "0.6:0,0:0.8",
        "--seed",
        "4",
    ];
    let mut json_args = base.to_vec();
    json_args.extend(["--out", json_path.to_str().unwrap()]);
    let mut csv_args = base.to_vec();
    csv_args.extend(["--format", "csv", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(run(&json_args), (0, String::new()));
    assert_eq!(run(&csv_args), (0, String::new()));

    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["channel", "quantity", "eps", "value", "seed"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let lookup = |quantity: &str, eps: Option<f64>| -> f64 {
        rows.iter()
            .find(|r| r[1] == *quantity && eps.is_none_or(|e| r[2].parse::<f64>().ok() == Some(e)))
            .unwrap_or_else(|| panic!("missing {quantity}"))[3]
            .parse()
            .unwrap()
    };
    let agree = |a: f64, b: f64| format!("{a:.14e}") == format!("{b:.14e}");
    for row in report["fisher"]["rows"].as_array().unwrap() {
        let eps = row["eps"].as_f64().unwrap();
        assert!(agree(
            lookup("exact_j", Some(eps)),
            row["exact_j"].as_f64().unwrap()
        ));
        assert!(agree(
            lookup("eps_times_j", Some(eps)),
            row["leading_coefficient"].as_f64().unwrap()
        ));
    }
    assert!(agree(
        lookup("leading_coefficient", None),
        report["fisher"]["leading_coefficient"].as_f64().unwrap()
    ));
    assert!(rows
        .iter()
        .all(|r| &r[0] == "amplitude_damping" && &r[4] == "4"));
}
