use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qtomo::cli::{estimate_records, exit_code, ExperimentConfig, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL};
use qtomo::dynamics::read_records;
use qtomo::Error;
use serde_json::Value;

fn qtomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtomo")).args(args).output().expect("run qtomo")
}

fn ok(args: &[&str]) -> String {
    let out = qtomo(args);
    assert!(
        out.status.success(),
        "qtomo {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["simulate", "--out", path_str(&out)];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

#[test]
fn ground_state_without_drive_reads_plus_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.ctom");
    let summary: Value = serde_json::from_str(&ok(&[
        "simulate",
        "--truth",
        "bloch:0,0,1",
        "--omega",
        "0",
        "--n-records",
        "1000",
        "--out",
        path_str(&out),
    ]))
    .unwrap();
    // Per-step readout σ = √(τ/dt) ≈ 6.3 over 2·10⁵ steps: standard error 0.014.
    let mean = summary["mean_readout"].as_f64().unwrap();
    assert!((mean - 1.0).abs() < 0.05, "mean readout {mean}");
    assert_eq!(summary["records"], 1000);
    assert_eq!(read_records(&out).unwrap().len(), 1000);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["--truth", "hs-random", "--n-records", "300", "--seed", "77", "--setting", "XYZ"];
    let one = simulate(dir.path(), "t1.ctom", &[&["--threads", "1"][..], &base].concat());
    let eight = simulate(dir.path(), "t8.ctom", &[&["--threads", "8"][..], &base].concat());
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&eight).unwrap());

    let mut reports = Vec::new();
    for threads in ["1", "8"] {
        let text = ok(&[
            "--threads",
            threads,
            "estimate",
            "--records",
            path_str(&one),
            "--grid-size",
            "3000",
            "--truth",
            "hs-random",
            "--seed",
            "77",
        ]);
        let mut v: Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        reports.push(v);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn cli_estimate_matches_in_process_call() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate(dir.path(), "r.ctom", &["--truth", "bloch:0.3,0.2,-0.5", "--n-records", "400"]);
    let csv_path = dir.path().join("est.csv");
    let report: Value = serde_json::from_str(&ok(&[
        "estimate",
        "--records",
        path_str(&records),
        "--grid-size",
        "2000",
        "--truth",
        "bloch:0.3,0.2,-0.5",
        "--csv",
        path_str(&csv_path),
    ]))
    .unwrap();

    let cfg = ExperimentConfig {
        truth: Some("bloch:0.3,0.2,-0.5".into()),
        estimation: qtomo::cli::EstimationConfig {
            grid_size: 2000,
            ..Default::default()
        },
        ..Default::default()
    };
    let recs = read_records(&records).unwrap();
    let truth = cfg.truth_state().unwrap();
    let direct = estimate_records(&cfg, &recs, Some(&truth), None).unwrap();

    let cli_coeffs: Vec<f64> = report["estimate"]["pauli"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(cli_coeffs.len(), 4);
    for (a, b) in cli_coeffs.iter().zip(&direct.estimate.coeffs) {
        assert!((a - b).abs() < 1e-12);
    }
    let f = report["fidelity_vs_truth"].as_f64().unwrap();
    assert!((f - direct.fidelity_vs_truth.unwrap()).abs() < 1e-12);
    assert_eq!(report["method"], "BME");

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "label,estimate,truth,error,bayes_std,known_zero");
    assert_eq!(lines.count(), 3);
}

#[test]
fn report_omits_fidelity_without_truth() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate(dir.path(), "r.ctom", &["--truth", "bloch:0,0.5,0", "--n-records", "50"]);
    let text = ok(&["estimate", "--records", path_str(&records), "--grid-size", "500"]);
    let report: Value = serde_json::from_str(&text).unwrap();
    assert!(report.get("fidelity_vs_truth").is_none());
    assert!(report.get("trace_distance_vs_truth").is_none());
    assert!(report.get("bayes_cov").is_some());
}

#[test]
fn empty_records_give_prior_mean() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate(
        dir.path(),
        "empty.ctom",
        &["--truth", "bloch:0,0,1", "--n-records", "1", "--total-time", "0", "--omega", "0"],
    );
    let recs = read_records(&records).unwrap();
    assert_eq!(recs.len(), 1);
    assert!(recs[0].readouts.is_empty());
    let report: Value =
        serde_json::from_str(&ok(&["estimate", "--records", path_str(&records), "--grid-size", "5000"])).unwrap();
    // No information: the estimate is the grid mean, close to the maximally mixed state.
    let c = report["estimate"]["pauli"].as_array().unwrap();
    let norm: f64 = c[1..].iter().map(|v| v.as_f64().unwrap().powi(2)).sum::<f64>().sqrt();
    assert!(norm < 0.05, "prior mean norm {norm}");
}

#[test]
fn mle_and_linear_inversion_methods_run() {
    let dir = tempfile::tempdir().unwrap();
    let truth = "bloch:0.2,-0.6,0.4";
    let records = simulate(dir.path(), "r.ctom", &["--truth", truth, "--n-records", "600"]);
    for method in ["mle", "mpbe", "li"] {
        let report: Value = serde_json::from_str(&ok(&[
            "estimate",
            "--records",
            path_str(&records),
            "--method",
            method,
            "--truth",
            truth,
            "--grid-size",
            "2000",
            "--de-restarts",
            "2",
        ]))
        .unwrap();
        let f = report["fidelity_vs_truth"].as_f64().unwrap();
        assert!(f > 0.9, "{method}: fidelity {f}");
    }
    // Linear inversion synthesizes tallies from the truth, which is therefore required.
    let out = qtomo(&["estimate", "--records", path_str(&records), "--method", "li"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_setting = qtomo(&["simulate", "--setting", "QQ", "--truth", "bell", "--out", "/dev/null"]);
    assert_eq!(bad_setting.status.code(), Some(EXIT_CONFIG));
    assert_eq!(qtomo(&["frobnicate"]).status.code(), Some(EXIT_CONFIG));

    let garbage = dir.path().join("garbage.ctom");
    std::fs::write(&garbage, b"not a record file").unwrap();
    let out = qtomo(&["estimate", "--records", path_str(&garbage)]);
    assert_eq!(out.status.code(), Some(EXIT_DATA));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // Records that disagree with an explicit configuration.
    let records = simulate(dir.path(), "r.ctom", &["--truth", "mixed", "--n-records", "5"]);
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, r#"{"setting": "X", "tau": 0.5}"#).unwrap();
    let out = qtomo(&["estimate", "--config", path_str(&cfg_path), "--records", path_str(&records)]);
    assert_eq!(out.status.code(), Some(EXIT_DATA));

    let bad_cfg = dir.path().join("bad.json");
    std::fs::write(&bad_cfg, r#"{"omega": 3}"#).unwrap();
    assert_eq!(qtomo(&["fisher", "--config", path_str(&bad_cfg)]).status.code(), Some(EXIT_CONFIG));

    assert_eq!(exit_code(&Error::DegenerateInformation), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::Underflow), EXIT_NUMERICAL);
}

#[test]
fn config_file_drives_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("from_cfg.ctom");
    let cfg_path = dir.path().join("cfg.json");
    let cfg = serde_json::json!({
        "setting": "0+XYZ",
        "truth": "catalog:remote-10:2",
        "ancilla": "bloch:0,1,0",
        "n_records": 20,
        "total_time": 1.0,
        "output": {"records": records},
    });
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    ok(&["simulate", "--config", path_str(&cfg_path)]);
    let recs = read_records(&records).unwrap();
    assert_eq!(recs.len(), 20);
    assert_eq!(recs[0].dim(), 4);
    assert_eq!(recs[0].config.n_steps, 100);
    // The matching config is accepted by estimate; with the ancilla along +y
    // every XI…XZ and ZI…ZZ coefficient is zero by construction.
    let text = ok(&[
        "estimate",
        "--config",
        path_str(&cfg_path),
        "--records",
        path_str(&records),
        "--grid-kind",
        "product-with-fixed-ancilla",
        "--grid-size",
        "500",
    ]);
    let report: Value = serde_json::from_str(&text).unwrap();
    let known: Vec<&str> = report["known_zero"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(known, ["XI", "XX", "XY", "XZ", "ZI", "ZX", "ZY", "ZZ"]);
    let est = report["estimate"]["pauli"].as_array().unwrap();
    assert!(est[4].as_f64().unwrap().abs() < 1e-12 && est[12].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn fisher_and_controls_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let doc: Value = serde_json::from_str(&ok(&[
        "fisher",
        "--omega",
        "0",
        "--n-records",
        "10",
        "--csv",
        path_str(&csv),
    ]))
    .unwrap();
    let diag: Vec<f64> = doc["diagonal"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((diag[2] - 5.0 * (-2.5f64).exp()).abs() < 1e-9);
    assert!(diag[0].abs() < 1e-12 && diag[1].abs() < 1e-12);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("label,fisher_diagonal,crb_variance,informed"));
    assert!(text.contains("Z,") && text.contains(",true"));

    let doc: Value = serde_json::from_str(&ok(&["controls", "--setting", "Y+Z", "--json"])).unwrap();
    let reach: Vec<&str> = doc["reachability"]["accessible"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(reach, ["XI", "YX", "YY", "ZI"]);
    let text = ok(&["controls", "--setting", "X"]);
    assert!(text.contains("inaccessible: X"));
}

#[test]
fn bench_rows_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let rows = dir.path().join("rows.csv");
    let summary = dir.path().join("summary.csv");
    ok(&[
        "bench",
        "--truth",
        "bloch:0.1,0.2,0.3",
        "--n-records",
        "50",
        "--grid-size",
        "300",
        "--repetitions",
        "1",
        "--out",
        path_str(&rows),
        "--summary",
        path_str(&summary),
    ]);
    let text = std::fs::read_to_string(&rows).unwrap();
    assert_eq!(text.lines().count(), 2, "header plus one row");
    assert!(text.lines().next().unwrap().contains("fidelity"));

    ok(&[
        "bench",
        "--truth",
        "bloch:0.1,0.2,0.3",
        "--n-records",
        "30",
        "--grid-size",
        "200",
        "--repetitions",
        "2",
        "--sweep",
        "omega=0,1.5",
        "--methods",
        "bme,mpbe",
        "--out",
        path_str(&rows),
    ]);
    let text = std::fs::read_to_string(&rows).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);

    let out = qtomo(&[
        "bench",
        "--truth",
        "hs-random",
        "--n-records",
        "5000",
        "--repetitions",
        "100",
        "--budget",
        "1e6",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn catalog_listing() {
    let names: Value = serde_json::from_str(&ok(&["catalog"])).unwrap();
    assert_eq!(names.as_array().unwrap().len(), 3);
    let entry: Value = serde_json::from_str(&ok(&["catalog", "remote-10", "--index", "0"])).unwrap();
    assert_eq!(entry["dim"], 2);
    let x = entry["pauli"][1].as_f64().unwrap();
    assert!((x - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
}
