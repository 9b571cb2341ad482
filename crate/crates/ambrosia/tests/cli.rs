//! End-to-end tests of the `ambrosia` binary: output files, exit codes,
//! validation behavior, and manifest-based reruns.

mod common;

use std::fs;

use common::{run_in, run_ok};

#[test]
fn simulate_constant_sends_bootstrap_only() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        dir.path(),
        &[
            "simulate",
            "--gen",
            "constant:5",
            "--len",
            "5",
            "--delta",
            "0.5",
            "--window",
            "2",
        ],
    );
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("simulate_metrics.json")).unwrap())
            .unwrap();
    assert_eq!(metrics["metrics"]["samples_sent"], 3);
    assert_eq!(metrics["metrics"]["n"], 5);

    let session = fs::read_to_string(dir.path().join("simulate_session.csv")).unwrap();
    assert_eq!(session.lines().next(), Some("index,true,processed,sent"));
    assert_eq!(session.lines().count(), 6);
}

#[test]
fn simulate_delta_zero_on_noisy_csv_sends_everything() {
    let dir = tempfile::tempdir().unwrap();
    // build a noisy CSV input first, then feed it back through --input
    run_ok(
        dir.path(),
        &[
            "simulate",
            "--gen",
            "random_walk:1",
            "--len",
            "100",
            "--noise",
            "0.5",
            "--delta",
            "1",
            "--prefix",
            "make",
        ],
    );
    // session CSV has true values under the "true" column
    run_ok(
        dir.path(),
        &[
            "simulate",
            "--input",
            "make_session.csv",
            "--value-column",
            "true",
            "--delta",
            "0",
        ],
    );
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("simulate_metrics.json")).unwrap())
            .unwrap();
    assert_eq!(metrics["metrics"]["data_sent_pct"], 100.0);
    assert_eq!(metrics["metrics"]["nmse"], 0.0);
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("simulate_manifest.json")).unwrap(),
    )
    .unwrap();
    assert!(manifest["input_digest"].is_string(), "file inputs are digested");
}

#[test]
fn rerun_reproduces_outputs_byte_exactly() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        dir.path(),
        &[
            "simulate",
            "--gen",
            "sinusoid:2,40",
            "--len",
            "150",
            "--noise",
            "0.2",
            "--delta",
            "0.4",
        ],
    );
    let first: Vec<(String, Vec<u8>)> = ["session.csv", "metrics.json", "manifest.json"]
        .iter()
        .map(|s| {
            let name = format!("simulate_{s}");
            let bytes = fs::read(dir.path().join(&name)).unwrap();
            (name, bytes)
        })
        .collect();

    let rerun_dir = tempfile::tempdir().unwrap();
    let manifest_path = dir.path().join("simulate_manifest.json");
    run_ok(
        rerun_dir.path(),
        &["rerun", "--manifest", &manifest_path.to_string_lossy()],
    );
    for (name, want) in &first {
        let got = fs::read(rerun_dir.path().join(name)).unwrap();
        assert_eq!(&got, want, "{name} not reproduced byte-exactly");
    }
}

#[test]
fn sweep_json_format_matches_csv_values() {
    let dir = tempfile::tempdir().unwrap();
    let gen_args = [
        "sweep", "--gen", "ar1:0.8", "--len", "120", "--noise", "0.1", "--deltas", "0.2,0.6",
        "--forecasters", "window",
    ];
    run_ok(dir.path(), &gen_args);
    let mut json_args = gen_args.to_vec();
    json_args.extend(["--format", "json", "--prefix", "sweepj"]);
    run_ok(dir.path(), &json_args);

    let csv = fs::read_to_string(dir.path().join("sweep_table.csv")).unwrap();
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sweepj_table.json")).unwrap())
            .unwrap();
    for (i, line) in csv.lines().skip(1).enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let cell = &rows[i]["cells"][0];
        assert_eq!(fields[0].parse::<f64>().unwrap(), rows[i]["delta"]);
        assert_eq!(fields[1], cell["forecaster"]);
        assert_eq!(
            fields[2].parse::<f64>().unwrap(),
            cell["metrics"]["data_sent_pct"]
        );
        assert_eq!(fields[3].parse::<f64>().unwrap(), cell["metrics"]["mse"]);
    }
}

#[test]
fn unsorted_deltas_fail_validation_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["sweep", "--gen", "ar1:0.8", "--deltas", "1,0.5"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("deltas must be ascending"));
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        0,
        "validation failure must not leave partial outputs"
    );
}

#[test]
fn unknown_tech_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["lifetime", "--tech", "zigbee"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("lora") && stderr.contains("sigfox"), "{stderr}");
}

#[test]
fn out_of_range_fraction_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["lifetime", "--fractions", "1.2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn zero_shingle_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["anomaly", "--gen", "constant:1", "--shingle", "0"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn missing_input_file_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["simulate", "--input", "absent.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_value_column_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.csv"), "index,reading\n0,1.0\n1,2.0\n").unwrap();
    let out = run_in(dir.path(), &["simulate", "--input", "d.csv", "--delta", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("value"));
}

#[test]
fn lifetime_lora_anchors() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        dir.path(),
        &["lifetime", "--tech", "lora", "--ti", "3600", "--fractions", "0.5,1"],
    );
    let csv = fs::read_to_string(dir.path().join("lifetime_curve.csv")).unwrap();
    let years: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!((years[0] - 6.83).abs() < 0.05, "{years:?}");
    assert!((years[1] - 3.54).abs() < 0.02, "{years:?}");
}

#[test]
fn compare_forecasters_single_n_and_small_n_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["compare-forecasters", "--n", "500", "--reps", "1"],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let csv = fs::read_to_string(dir.path().join("compare_timing.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "header plus one row");
}

#[test]
fn anomaly_reports_preservation_per_delta() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run_ok(
        dir.path(),
        &[
            "anomaly",
            "--gen",
            "sinusoid:2,50",
            "--len",
            "400",
            "--noise",
            "0.1",
            "--spike",
            "120:10",
            "--deltas",
            "0.5",
            "--tau",
            "25",
        ],
    );
    assert!(stdout.contains("peaks preserved: yes"), "{stdout}");
    let scores = fs::read_to_string(dir.path().join("anomaly_scores_delta0.5.csv")).unwrap();
    assert_eq!(
        scores.lines().next(),
        Some("index,score_true,score_processed")
    );
    assert_eq!(scores.lines().count(), 401);
}

#[test]
fn help_exits_zero_and_documents_flags() {
    let dir = tempfile::tempdir().unwrap();
    for sub in [
        "simulate",
        "sweep",
        "anomaly",
        "lifetime",
        "compare-forecasters",
        "displacement",
        "rerun",
    ] {
        let out = run_in(dir.path(), &[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub} --help");
        assert!(!out.stdout.is_empty());
    }
    let out = run_in(dir.path(), &["simulate", "--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--delta", "--forecaster", "--window", "--gen"] {
        assert!(text.contains(flag), "help missing {flag}");
    }
}

#[test]
fn env_var_sets_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("results");
    let out = std::process::Command::new(common::bin())
        .args(["simulate", "--gen", "constant:1", "--len", "10", "--window", "2"])
        .current_dir(dir.path())
        .env("AMBROSIA_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out_dir.join("simulate_metrics.json").is_file());
}
