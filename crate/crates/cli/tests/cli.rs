//! End-to-end tests of the `phasesplit` binary: output contracts,
//! determinism, config merging and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasesplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|line| !line.starts_with('#'))
        .skip(1)
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

fn field(row: &[String], index: usize) -> f64 {
    row[index].parse().expect("numeric field")
}

#[test]
fn sweep_emits_contracted_columns_and_small_method_gaps() {
    let output = run(&[
        "sweep", "--var", "area", "--from", "0", "--to", "6.0", "--points", "12",
        "--steps", "2000",
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# phasesplit "));
    assert_eq!(lines.next().unwrap(), "# command: sweep");
    assert!(lines.next().unwrap().starts_with("# config: fnv1a64:"));
    assert_eq!(lines.next().unwrap(), "# seed: 0");
    assert_eq!(
        lines.next().unwrap(),
        "param,P_analytic,P_numerical,abs_diff,alpha,beta"
    );
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 12);
    assert!(field(&rows[0], 0) > 0.0, "area grid must exclude zero");
    for row in &rows {
        assert_eq!(row.len(), 6);
        assert!(field(row, 3) < 1e-6, "abs_diff too large: {}", row[3]);
    }
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let args = [
        "sweep", "--var", "phase", "--area", "2.0", "--from", "0", "--to", "3.14",
        "--points", "9", "--steps", "1000", "--seed", "11", "--workers", "3",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_respects_config_file_with_flags_winning() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{
  "steps": 1000,
  "sweep": { "var": "area", "from": 0.0, "to": 3.0, "points": 5 }
}"#,
    )
    .unwrap();
    let base = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert!(base.status.success());
    assert_eq!(data_rows(&stdout_of(&base)).len(), 5);

    let overridden = run(&[
        "sweep", "--config", config.to_str().unwrap(), "--points", "7",
    ]);
    assert!(overridden.status.success());
    assert_eq!(data_rows(&stdout_of(&overridden)).len(), 7);
}

#[test]
fn sweep_writes_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let output = run(&[
        "sweep", "--var", "area", "--to", "2.0", "--points", "3", "--steps", "1000",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(output.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(data_rows(&text).len(), 3);
}

#[test]
fn area_scan_preset_approaches_the_half_transfer_plateau() {
    let output = run(&["sweep", "--preset", "fig-area-scan", "--steps", "1000"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 600);
    let last = rows.last().unwrap();
    let area = field(last, 0);
    assert!((area - 6.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((field(last, 1) - 0.5).abs() <= 1.0 / (area * area + 1.0));
}

#[test]
fn depth_scan_preset_emits_pulse_counts() {
    let output = run(&["sweep", "--preset", "fig-depth-scan", "--steps", "1000"]);
    assert!(output.status.success());
    let rows = data_rows(&stdout_of(&output));
    let params: Vec<f64> = rows.iter().map(|r| field(r, 0)).collect();
    assert_eq!(params, vec![1.0, 2.0, 4.0, 8.0]);
    for row in &rows {
        assert!(field(row, 3) < 1e-6);
    }
}

#[test]
fn error_table_reports_the_suppression_cells_and_typo_note() {
    let output = run(&["error-table"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("epsilon,n,relative_error,reference,note"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 6);
    let cell = |eps: f64, n: f64| -> Vec<String> {
        rows.iter()
            .find(|r| (field(r, 0) - eps).abs() < 1e-12 && field(r, 1) == n)
            .unwrap()
            .clone()
    };
    assert!((field(&cell(0.05, 2.0), 2) - 1e-2).abs() < 1e-15);
    assert!((field(&cell(0.01, 2.0), 2) - 4e-4).abs() < 1e-15);
    assert!((field(&cell(0.01, 4.0), 2) - 1.6e-7).abs() < 1e-15);
    let flagged = cell(0.05, 8.0);
    assert!((field(&flagged, 2) - 1e-8).abs() < 1e-15);
    assert!((field(&flagged, 3) - 1e-6).abs() < 1e-20);
    assert!(flagged[4].contains("suspected typo"));
}

#[test]
fn validate_is_green_and_seed_deterministic() {
    let args = ["validate", "--trials", "4", "--seed", "7"];
    let first = run(&args);
    assert!(first.status.success(), "stderr: {}", String::from_utf8_lossy(&first.stderr));
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);

    let report: serde_json::Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_eq!(report["all_passed"], serde_json::Value::Bool(true));
    assert_eq!(report["seed"], serde_json::json!(7));
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 7);
    for check in checks {
        assert_eq!(check["passed"], serde_json::Value::Bool(true));
        assert!(check["max_deviation"].as_f64().unwrap() <= check["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn exact_reports_the_even_split_reference_point() {
    let output = run(&["exact", "--area", "1.7320508075688772", "--phi", "1.5707963267948966"]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert!((doc["p"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((doc["alpha"].as_f64().unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    assert!((doc["beta"].as_f64().unwrap() + std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    assert!((doc["pair"]["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn propagate_reports_propagator_and_adiabaticity() {
    let output = run(&["propagate", "--area", "1.7320508075688772", "--steps", "4000"]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert!((doc["p"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(doc["unitarity_drift"].as_f64().unwrap().abs() < 1e-9);
    let eta = doc["adiabaticity"]["eta"].as_f64().unwrap();
    let expected = 1.7320508075688772 * std::f64::consts::FRAC_PI_2;
    assert!((eta - expected).abs() < 1e-6);
    assert!(!doc["adiabaticity"]["degenerate"].as_bool().unwrap());
}

#[test]
fn propagate_accepts_tabulated_csv_pulses(){
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pulse.csv");
    let mut text = String::from("t,omega,delta\n");
    for k in 0..200 {
        let t = k as f64 / 199.0;
        text.push_str(&format!(
            "{},{},{}\n",
            t,
            (std::f64::consts::PI * t).sin(),
            1.0 - 2.0 * t
        ));
    }
    std::fs::write(&path, text).unwrap();
    let output = run(&["propagate", "--pulse", path.to_str().unwrap(), "--steps", "4000"]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let p = doc["p"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(doc["source"].as_str().unwrap(), path.to_str().unwrap());
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["sweep", "--nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["sweep"]).status.code(), Some(1), "missing --var");
    assert_eq!(
        run(&["sweep", "--var", "phase", "--points", "4"]).status.code(),
        Some(1),
        "phase sweep without --area"
    );
    assert_eq!(
        run(&["sweep", "--var", "area", "--points", "1"]).status.code(),
        Some(1),
        "too few points"
    );
    assert_eq!(
        run(&["sweep", "--var", "area", "--points", "4", "--steps", "5"]).status.code(),
        Some(1),
        "step count below the minimum"
    );
    assert_eq!(run(&["validate", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(run(&["propagate"]).status.code(), Some(1));
    assert_eq!(
        run(&["propagate", "--pulse", "/nonexistent/pulse.csv"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["exact"]).status.code(), Some(1), "missing --area");
    assert_eq!(
        run(&["error-table", "--epsilons", "0.7"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["error-table", "--depths", "3"]).status.code(),
        Some(1)
    );
}

#[test]
fn malformed_pulse_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.csv");
    std::fs::write(&path, "time,rabi\n0,1\n1,2\n").unwrap();
    let output = run(&["propagate", "--pulse", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&output.stderr).is_empty());
}

#[test]
fn bad_config_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let output = run(&["sweep", "--var", "area", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert_eq!(
        run(&["sweep", "--var", "area", "--config", "/nonexistent.json"]).status.code(),
        Some(1)
    );
}

