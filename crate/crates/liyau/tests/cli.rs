//! CLI contract tests: report round-trips, config-file merging, CSV dialect,
//! and error paths beyond what the acceptance suite covers.

use liyau::cli::render_summary;
use liyau::report::Report;
use std::path::Path;
use std::process::Command;

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_liyau"))
        .args(args)
        .current_dir(dir)
        .env_remove("LIYAU_THREADS")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn eval_prints_bound_and_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run_in(
        dir.path(),
        &[
            "eval", "--estimate", "davies_beta", "--beta", "0.5", "--t", "1", "--n", "2", "--k",
            "1",
        ],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("bound = 3.0"), "stdout: {stdout}");
    assert!(dir.path().join("eval.json").exists());

    // Re-reading the report reproduces the printed summary byte-identically.
    let report = Report::read(&dir.path().join("eval.json")).unwrap();
    let summary = render_summary(&report);
    assert!(
        stdout.starts_with(&summary),
        "summary mismatch:\n--- stdout ---\n{stdout}\n--- re-rendered ---\n{summary}"
    );
    assert_eq!(report.schema_version, 1);
    assert_eq!(report.provenance.wall_time, None);
}

#[test]
fn every_subcommand_summary_round_trips() {
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (
            vec![
                "compare", "--a", "cor14", "--b", "cor12", "--n", "2", "--k", "1", "--t-count",
                "8", "--beta-count", "3",
            ],
            "compare.json",
        ),
        (
            vec![
                "optimize", "--which", "phi2", "--beta0", "0.4", "--t0", "0.8", "--n", "2", "--k",
                "1", "--families", "linear",
            ],
            "optimize.json",
        ),
        (
            vec![
                "verify", "--model", "hyperbolic3", "--c", "1", "--estimate", "cor14", "--beta",
                "0.5", "--r-max", "20", "--t-min", "0.05", "--t-max", "5", "--nr", "64", "--nt",
                "32",
            ],
            "report.json",
        ),
        (
            vec![
                "simulate", "--model", "euclidean", "--n", "3", "--initial", "constant",
                "--value", "1.0", "--r-max", "5", "--nr", "33", "--dt", "0.05", "--t-end", "0.2",
                "--estimate", "davies_beta", "--beta", "0.5", "--k", "1", "--eps-disc", "1e-9",
            ],
            "simulate.json",
        ),
    ];
    for (args, file) in cases {
        let dir = tempfile::tempdir().unwrap();
        let (code, stdout, stderr) = run_in(dir.path(), &args);
        assert_eq!(code, 0, "{args:?} failed: {stderr}");
        let report = Report::read(&dir.path().join(file)).unwrap();
        let summary = render_summary(&report);
        assert!(
            stdout.starts_with(&summary),
            "{args:?} summary mismatch:\n{stdout}\nvs\n{summary}"
        );
    }
}

#[test]
fn verify_example_hyperbolic_cor14_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run_in(
        dir.path(),
        &[
            "verify", "--model", "hyperbolic3", "--c", "1", "--estimate", "cor14", "--beta",
            "0.5", "--r-max", "20", "--t-min", "0.05", "--t-max", "5", "--nr", "128", "--nt",
            "64", "--dump-grid",
        ],
    );
    assert_eq!(code, 0);
    let report = Report::read(&dir.path().join("report.json")).unwrap();
    let violation = report.results["max_violation"].as_f64().unwrap();
    assert!(violation <= 1e-9, "violation {violation}");

    // Slack-grid CSV: header plus 128*64 rows of 17-significant-digit floats.
    let csv = std::fs::read_to_string(dir.path().join("verify_grid.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "r,t,lhs,rhs,slack");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 128 * 64);
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first.len(), 5);
    assert!(!csv.contains('\r'), "CSV must use LF line endings");
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"estimate": "davies_beta", "beta": 0.5, "t": 1.0, "n": 2, "k": 1.0}"#,
    )
    .unwrap();
    let (code, stdout, _) = run_in(dir.path(), &["eval", "--config", "run.json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("bound = 3.0"), "stdout: {stdout}");

    // A flag overrides the config value: beta = 0.25 gives 4 + 2/3.
    let (code, stdout, _) = run_in(
        dir.path(),
        &["eval", "--config", "run.json", "--beta", "0.25"],
    );
    assert_eq!(code, 0);
    let report = Report::read(&dir.path().join("eval.json")).unwrap();
    let bound = report.results["bound"].as_f64().unwrap();
    assert!((bound - (4.0 + 2.0 / 3.0)).abs() < 1e-12, "bound {bound} ({stdout})");
}

#[test]
fn config_curve_objects_are_accepted() {
    // Parameter curves may appear in the config file as
    // {"family": "...", "params": [...]}.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("psi.json");
    std::fs::write(
        &cfg,
        r#"{
            "estimate": "psi1",
            "beta_curve": {"family": "rational", "params": [2.0]},
            "t": 1.0, "n": 2, "k": 1.0
        }"#,
    )
    .unwrap();
    let (code, _, stderr) = run_in(dir.path(), &["eval", "--config", "psi.json"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let report = Report::read(&dir.path().join("eval.json")).unwrap();
    let bound = report.results["bound"].as_f64().unwrap();
    // The rational curve at theta = 2 gives 3.5 at (t, n, k) = (1, 2, 1).
    assert!((bound - 3.5).abs() < 1e-9, "bound {bound}");
}

#[test]
fn compare_writes_verdict_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run_in(
        dir.path(),
        &[
            "compare", "--a", "cor14", "--b", "davies_beta", "--n", "2", "--k", "1", "--t-min",
            "0.01", "--t-max", "100", "--t-count", "12", "--beta-count", "5",
        ],
    );
    assert_eq!(code, 0);
    assert!(
        stdout.contains("FirstEverywhereLeq"),
        "verdict missing: {stdout}"
    );
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,beta,bound_first,bound_second,diff"
    );
    assert_eq!(lines.count(), 12 * 5);
    // Every diff column entry is nonpositive: the improvement dominates.
    for line in csv.lines().skip(1) {
        let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff <= 1e-12, "positive diff in {line}");
    }
}

#[test]
fn usage_and_domain_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown estimate identifier.
    let (code, _, stderr) = run_in(
        dir.path(),
        &["eval", "--estimate", "nope", "--t", "1", "--n", "2", "--k", "1"],
    );
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("unknown estimate"));

    // Parameter outside its validity domain.
    let (code, _, stderr) = run_in(
        dir.path(),
        &[
            "eval", "--estimate", "davies_beta", "--beta", "1.5", "--t", "1", "--n", "2", "--k",
            "1",
        ],
    );
    assert_eq!(code, 2, "stderr: {stderr}");

    // cor12 needs k > 0.
    let (code, _, stderr) = run_in(
        dir.path(),
        &[
            "eval", "--estimate", "cor12", "--beta", "0.5", "--t", "1", "--n", "2", "--k", "0",
        ],
    );
    assert_eq!(code, 2, "stderr: {stderr}");

    // hyperbolic3 pins n = 3.
    let (code, _, stderr) = run_in(
        dir.path(),
        &[
            "verify", "--model", "hyperbolic3", "--n", "2", "--estimate", "hamilton",
        ],
    );
    assert_eq!(code, 2, "stderr: {stderr}");

    // Missing required option.
    let (code, _, stderr) = run_in(dir.path(), &["eval", "--estimate", "hamilton"]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("missing required option"));
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["--help"]).0, 0);
    assert_eq!(run_in(dir.path(), &["--version"]).0, 0);
    assert_eq!(run_in(dir.path(), &["eval", "--help"]).0, 0);
}

#[test]
fn threads_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_liyau"))
        .args([
            "verify", "--model", "euclidean", "--n", "2", "--k", "0", "--estimate", "hamilton",
            "--nr", "32", "--nt", "16",
        ])
        .current_dir(dir.path())
        .env("LIYAU_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = Report::read(&dir.path().join("report.json")).unwrap();
    assert_eq!(report.config_echo["threads"], serde_json::json!(1));
}

#[test]
fn psi_estimates_reachable_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    // psi1 with the exponential curve at theta = 1 equals e^2 at t=1, k=1.
    let (code, _, stderr) = run_in(
        dir.path(),
        &[
            "eval", "--estimate", "psi1", "--beta-family", "exponential", "--theta", "1", "--t",
            "1", "--n", "2", "--k", "1",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    let report = Report::read(&dir.path().join("eval.json")).unwrap();
    let bound = report.results["bound"].as_f64().unwrap();
    assert!(
        (bound - std::f64::consts::E.powi(2)).abs() < 1e-9,
        "bound {bound}"
    );

    // qian_general defaults to the sinh^2 weight at rate k.
    let (code, _, _) = run_in(
        dir.path(),
        &[
            "eval", "--estimate", "qian_general", "--t", "1", "--n", "2", "--k", "1",
        ],
    );
    assert_eq!(code, 0);
    let report = Report::read(&dir.path().join("eval.json")).unwrap();
    let got = report.results["bound"].as_f64().unwrap();
    let (_, want) =
        liyau::bounds::eval_classical(liyau::bounds::EstimateId::LiXu, &[], 1.0, 2, 1.0).unwrap();
    assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
}
