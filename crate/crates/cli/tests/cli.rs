//! End-to-end runs of the `cpm` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cpm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpm"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn cpm");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn simulate_csv(dir: &Path, n: usize, p: usize, seed: u64) -> PathBuf {
    let csv = dir.join(format!("sim_{seed}.csv"));
    run_ok(cpm().args([
        "simulate",
        "--n",
        &n.to_string(),
        "--p",
        &p.to_string(),
        "--transform",
        "identity",
        "--residual",
        "logistic",
        "--seed",
        &seed.to_string(),
        "--out",
        csv.to_str().unwrap(),
    ]));
    csv
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn alpha_column(dir: &Path) -> Vec<f64> {
    read(&dir.join("alpha.tsv"))
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn identical_runs_produce_byte_identical_estimates() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = simulate_csv(tmp.path(), 300, 3, 5);
    let at = tmp.path().join("at.csv");
    std::fs::write(&at, "x1,x2,x3\n0,1.0,0.5\n1,0.2,-0.4\n").unwrap();

    for run in ["a", "b"] {
        run_ok(cpm().args([
            "fit",
            "--input",
            csv.to_str().unwrap(),
            "--outcome",
            "y",
            "--predictors",
            "all",
            "--approach",
            "divide-combine",
            "--subsets",
            "3",
            "--seed",
            "11",
            "--predict-at",
            at.to_str().unwrap(),
            "--out",
            tmp.path().join(run).to_str().unwrap(),
        ]));
    }
    for file in ["alpha.tsv", "beta.tsv", "predictions.tsv"] {
        let a = read(&tmp.path().join("a").join(file));
        let b = read(&tmp.path().join("b").join(file));
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn alpha_estimates_are_nondecreasing_for_every_approach() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = simulate_csv(tmp.path(), 400, 2, 9);
    let approaches: &[(&str, &[&str])] = &[
        ("whole", &[]),
        ("divide-combine", &["--subsets", "4"]),
        ("bin", &["--target", "50"]),
        ("round-decimal", &["--target", "50"]),
        ("round-sigdigit", &["--target", "50"]),
    ];
    for (approach, extra) in approaches {
        let out = tmp.path().join(approach);
        let mut cmd = cpm();
        cmd.args([
            "fit",
            "--input",
            csv.to_str().unwrap(),
            "--outcome",
            "y",
            "--predictors",
            "x1,x2",
            "--approach",
            approach,
            "--seed",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        cmd.args(*extra);
        run_ok(&mut cmd);
        let alpha = alpha_column(&out);
        assert!(
            alpha.windows(2).all(|w| w[0] <= w[1]),
            "{approach}: alpha column not non-decreasing"
        );
        let meta = read(&out.join("meta.json"));
        assert!(meta.contains("\"approach\""));
    }
}

#[test]
fn missing_column_error_names_candidates() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("toy.csv");
    std::fs::write(&csv, "y,aa,bb\n1,2,3\n2,3,4\n3,4,5\n").unwrap();
    let out = cpm()
        .args([
            "fit",
            "--input",
            csv.to_str().unwrap(),
            "--outcome",
            "y",
            "--predictors",
            "zz",
            "--out",
            tmp.path().join("run").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("zz"));
    assert!(stderr.contains("aa") && stderr.contains("bb"), "{stderr}");
}

#[test]
fn failed_runs_leave_no_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = simulate_csv(tmp.path(), 100, 2, 13);
    let bad_at = tmp.path().join("bad_at.csv");
    std::fs::write(&bad_at, "wrong,columns\n1,2\n").unwrap();
    let out_dir = tmp.path().join("partial");
    let out = cpm()
        .args([
            "fit",
            "--input",
            csv.to_str().unwrap(),
            "--outcome",
            "y",
            "--predictors",
            "all",
            "--predict-at",
            bad_at.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    // alpha/beta were written before the predict step failed; they must be
    // cleaned up again.
    assert!(!out_dir.join("alpha.tsv").exists());
    assert!(!out_dir.join("beta.tsv").exists());
    assert!(!out_dir.join("meta.json").exists());
}

#[test]
fn config_file_fills_flags_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = simulate_csv(tmp.path(), 200, 2, 21);
    let conf = tmp.path().join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "input = {}\noutcome = y\npredictors = all\napproach = bin\ntarget = 40\nseed = 4\n",
            csv.display()
        ),
    )
    .unwrap();
    let out_a = tmp.path().join("cfg_a");
    run_ok(cpm().args([
        "fit",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]));
    let meta = read(&out_a.join("meta.json"));
    assert!(meta.contains("\"approach\": \"bin\""));

    // Flag overrides the config's approach.
    let out_b = tmp.path().join("cfg_b");
    run_ok(cpm().args([
        "fit",
        "--config",
        conf.to_str().unwrap(),
        "--approach",
        "whole",
        "--out",
        out_b.to_str().unwrap(),
    ]));
    let meta = read(&out_b.join("meta.json"));
    assert!(meta.contains("\"approach\": \"whole\""));
}

#[test]
fn discretize_writes_transformed_csv_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = simulate_csv(tmp.path(), 300, 2, 31);
    let out_csv = tmp.path().join("reduced.csv");
    let report = tmp.path().join("report.tsv");
    let out = run_ok(cpm().args([
        "discretize",
        "--input",
        csv.to_str().unwrap(),
        "--outcome",
        "y",
        "--approach",
        "bin",
        "--target",
        "30",
        "--seed",
        "2",
        "--out",
        out_csv.to_str().unwrap(),
        "--report-edges",
        "0",
        "--report-out",
        report.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"achieved\": 30"), "{stdout}");
    let text = read(&out_csv);
    assert_eq!(text.lines().count(), 301);
    let distinct: std::collections::HashSet<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(distinct.len(), 30);
    let report_text = read(&report);
    assert!(report_text.starts_with("region\t"));
    assert!(report_text.contains("total"));
}

#[test]
fn predict_from_saved_model_matches_fit_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = simulate_csv(tmp.path(), 250, 2, 41);
    let at = tmp.path().join("at.csv");
    std::fs::write(&at, "x1,x2\n0,0.8\n1,1.6\n").unwrap();
    let fit_dir = tmp.path().join("fit");
    run_ok(cpm().args([
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--outcome",
        "y",
        "--predictors",
        "all",
        "--predict-at",
        at.to_str().unwrap(),
        "--out",
        fit_dir.to_str().unwrap(),
    ]));
    let standalone = tmp.path().join("preds.tsv");
    run_ok(cpm().args([
        "predict",
        "--model",
        fit_dir.to_str().unwrap(),
        "--at",
        at.to_str().unwrap(),
        "--out",
        standalone.to_str().unwrap(),
    ]));
    assert_eq!(read(&standalone), read(&fit_dir.join("predictions.tsv")));
}

#[test]
fn bench_grid_emits_records_and_models() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bench");
    run_ok(cpm().args([
        "bench",
        "--ns",
        "200,400",
        "--ms",
        "60,150",
        "--ps",
        "2,3",
        "--seed",
        "3",
        "--memory-min-m",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]));
    let records = read(&out.join("records.csv"));
    assert_eq!(records.lines().count(), 9, "{records}"); // header + 8 cells
    let models = read(&out.join("models.json"));
    assert!(models.contains("\"time\""));
    assert!(models.contains("\"memory\""));
    let tsv = read(&out.join("loglog.tsv"));
    assert!(tsv.lines().count() >= 2);
}

#[test]
fn seed_sweep_records_per_seed_estimates() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = simulate_csv(tmp.path(), 240, 2, 51);
    let out = tmp.path().join("sweep");
    run_ok(cpm().args([
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--outcome",
        "y",
        "--predictors",
        "all",
        "--approach",
        "divide-combine",
        "--subsets",
        "3",
        "--seed",
        "7",
        "--seed-sweep",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]));
    let sweep = read(&out.join("seed_sweep.tsv"));
    // 3 seeds x 2 coefficients + header.
    assert_eq!(sweep.lines().count(), 7, "{sweep}");
    assert!(sweep.contains("7\tx1"));
    assert!(sweep.contains("9\tx2"));
}
