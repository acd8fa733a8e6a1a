//! End-to-end checks of the `catperc` binary: exit statuses, printed
//! oracle values, and the files a run/sweep leaves behind.

use std::path::Path;
use std::process::{Command, Output};

fn catperc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catperc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn oracle_prints_the_analytic_distances() {
    let dir = tempfile::tempdir().unwrap();
    let out = catperc(&["oracle", "--n", "20", "--k", "1", "--a", "0.6"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.trim(), "within 38, between 39.44");

    let out = catperc(&["oracle", "--n", "10", "--k", "5"], dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.trim(), "within 10, between 30");
}

#[test]
fn oracle_rejects_invalid_specs_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = catperc(&["oracle", "--n", "4", "--k", "9"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gradcheck_reports_and_exits_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = catperc(&["gradcheck"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("tied-weight autoencoder"));
    assert!(stdout.contains("classifier, cross-entropy"));
    assert!(stdout.contains("worst:"));
}

#[test]
fn run_subcommand_writes_weights_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "scenario = vector\nn = 10\nk = 2\nper_category = 20\nunsup_epochs = 25\nsup_epochs = 40\n",
    )
    .unwrap();
    let out = catperc(
        &["run", "--config", "run.cfg", "--seed", "7", "--out", "artifacts"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("v-n10-k2-a1-s7"), "{stdout}");

    let artifacts = dir.path().join("artifacts");
    for suffix in ["unsup.weights", "sup.weights", "unsup.csv", "sup.csv", "report.csv"] {
        let path = artifacts.join(format!("v-n10-k2-a1-s7.{suffix}"));
        assert!(path.exists(), "missing {}", path.display());
    }
    // The per-run report carries one row per probe.
    let report = std::fs::read_to_string(artifacts.join("v-n10-k2-a1-s7.report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains(",pre_activation,"));
    assert!(lines[2].contains(",post_activation,"));
}

#[test]
fn sweep_subcommand_writes_tables_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "per_category = 20\nunsup_epochs = 25\nsup_epochs = 40\n").unwrap();
    let out = catperc(
        &[
            "sweep",
            "--config",
            "sweep.cfg",
            "--scenario",
            "vector",
            "--n",
            "10",
            "--k",
            "5,2",
            "--seeds",
            "2",
            "--out",
            "results",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = dir.path().join("results");
    assert!(results.join("sweep.csv").exists());
    assert!(results.join("summary.csv").exists());
    assert!(results.join("sp_vs_k_n10.svg").exists());
    assert!(results.join("sp_vs_k_n10.dat").exists());
    assert!(results.join("distances_vs_k_n10.svg").exists());
    assert!(results.join("distances_vs_k_n10.dat").exists());

    let csv = std::fs::read_to_string(results.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5, "header + 4 data rows");
}

#[test]
fn malformed_config_files_exit_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "not a key value line\n").unwrap();
    let out = catperc(&["run", "--config", "bad.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("config error"), "{stderr}");

    std::fs::write(&cfg, "made_up_key = 3\n").unwrap();
    let out = catperc(&["sweep", "--config", "bad.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_override_flows_into_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "n = 8\nk = 2\nper_category = 10\nunsup_epochs = 15\nsup_epochs = 20\n",
    )
    .unwrap();
    let out = catperc(
        &["run", "--config", "run.cfg", "--probe", "post_activation", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("probe post_activation"), "{stdout}");

    let out = catperc(
        &["run", "--config", "run.cfg", "--probe", "sideways", "--out", "o"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
