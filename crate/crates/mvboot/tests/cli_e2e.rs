//! End-to-end checks of the binary: exit codes, error lines, and the
//! table/JSON format contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mtcars() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/mtcars.csv")
        .to_str()
        .unwrap()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvboot"))
        .args(args)
        .output()
        .unwrap()
}

fn write_temp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join("mvboot-e2e");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).trim().to_string()
}

#[test]
fn config_errors_exit_2() {
    let csv = mtcars();
    for args in [
        vec!["boot-fixed", "--input", &csv, "--responses", "mpg", "--predictors", "wt", "--B", "1"],
        vec!["boot-fixed", "--input", &csv, "--responses", "mpg", "--predictors", "wt", "--alpha", "1.5"],
        vec!["fit", "--input", &csv, "--responses", "mpg", "--predictors", "mpg"],
        vec!["fit", "--input", &csv, "--responses", "mpg", "--predictors", "wt", "--factors", "qsec"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}: {}", stderr_line(&out));
        let line = stderr_line(&out);
        let parsed: serde_json::Value = serde_json::from_str(&line).expect("machine-readable stderr");
        assert_eq!(parsed["code"], 2);
    }

    // Unknown config key in a simulate file is a config error too.
    let cfg = write_temp("bad-key.conf", "kind = table1\nbogus = 1\n");
    let out = run(&["simulate", "--input", &cfg]);
    assert_eq!(out.status.code(), Some(2));

    // clap's own rejection of an unknown flag also lands on 2.
    let out = run(&["fit", "--nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ingestion_errors_exit_3() {
    let csv = mtcars();
    let bad_cell = write_temp("bad-cell.csv", "y,x\n1,2\n3,not-a-number\n");
    let empty = write_temp("empty.csv", "y,x\n");
    let one_level = write_temp("one-level.csv", "y,g\n1,a\n2,a\n3,a\n");

    for (args, needle) in [
        (vec!["fit", "--input", "/nonexistent/file.csv", "--responses", "mpg", "--predictors", "wt"], "error"),
        (vec!["fit", "--input", &csv, "--responses", "mpg", "--predictors", "nope"], "missing column"),
        (vec!["fit", "--input", &bad_cell, "--responses", "y", "--predictors", "x"], "not-a-number"),
        (vec!["fit", "--input", &empty, "--responses", "y", "--predictors", "x"], "no data rows"),
        (vec!["fit", "--input", &one_level, "--responses", "y", "--predictors", "g", "--factors", "g"], "level"),
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(3), "args {args:?}: {}", stderr_line(&out));
        let line = stderr_line(&out);
        assert!(
            line.to_lowercase().contains(needle),
            "stderr {line:?} should mention {needle:?}"
        );
        let parsed: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed["code"], 3);
    }
}

#[test]
fn singular_design_exits_4() {
    // Duplicating a predictor column makes X'X exactly singular.
    let out = run(&[
        "fit", "--input", &mtcars(), "--responses", "mpg", "--predictors", "wt,wt",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr_line(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stderr_line(&out)).unwrap();
    assert_eq!(parsed["code"], 4);
}

#[test]
fn bootstrap_failure_exits_5() {
    // Three draws cannot separate the 0.5% and 99.5% ceiling ranks.
    let out = run(&[
        "boot-fixed", "--input", &mtcars(), "--responses", "mpg", "--predictors", "wt",
        "--B", "3", "--alpha", "0.99",
    ]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr_line(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stderr_line(&out)).unwrap();
    assert_eq!(parsed["code"], 5);
}

#[test]
fn json_carries_exactly_the_printed_endpoints() {
    let csv = mtcars();
    let base = [
        "boot-fixed", "--input", &csv, "--responses", "mpg,disp,hp", "--predictors",
        "cyl,am", "--factors", "cyl,am", "--B", "128", "--seed", "7",
    ];
    let table_out = run(&base);
    assert!(table_out.status.success());
    let table_text = String::from_utf8(table_out.stdout).unwrap();

    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let json_out = run(&json_args);
    assert!(json_out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();

    assert_eq!(parsed["command"], "boot-fixed");
    assert_eq!(parsed["replicates"], 128);
    assert_eq!(parsed["seed"], 7);
    assert_eq!(parsed["reference_levels"]["cyl"], "4");
    assert_eq!(parsed["reference_levels"]["am"], "0");

    let tables = parsed["tables"].as_array().unwrap();
    assert_eq!(tables.len(), 2);
    assert_eq!(tables[0]["method"], "percentile");
    assert_eq!(tables[1]["method"], "normal-fixed");

    // Every printed "(lo, hi)" pair must appear in the JSON verbatim
    // (same value after the shared rounding rule).
    for table in tables {
        for comp in table["components"].as_array().unwrap() {
            let label = comp["label"].as_str().unwrap();
            let lower = comp["lower"].as_f64().unwrap();
            let upper = comp["upper"].as_f64().unwrap();
            let line = table_text
                .lines()
                .find(|l| l.starts_with(label))
                .unwrap_or_else(|| panic!("missing table line for {label}"));
            let printed = format!("({lower:.3}, {upper:.3})");
            assert!(
                line.contains(&printed),
                "table line {line:?} lacks {printed:?}"
            );
        }
    }
}

#[test]
fn fit_json_matches_table_rounding() {
    let csv = mtcars();
    let out = run(&[
        "fit", "--input", &csv, "--responses", "mpg", "--predictors", "wt,hp",
        "--format", "json",
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["n"], 32);
    assert_eq!(parsed["p"], 3);
    assert_eq!(parsed["r"], 1);
    // Classic reference values for this fit.
    let coefs = parsed["coefficients"].as_array().unwrap();
    let by_pred = |name: &str| -> f64 {
        coefs
            .iter()
            .find(|c| c["predictor"] == name)
            .unwrap()["estimate"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(by_pred("(Intercept)"), 37.227);
    assert_eq!(by_pred("wt"), -3.878);
    assert_eq!(by_pred("hp"), -0.032);
}

#[test]
fn output_flag_writes_file_and_silences_stdout() {
    let path = write_temp("report.json", "");
    let out = run(&[
        "fit", "--input", &mtcars(), "--responses", "mpg", "--predictors", "wt",
        "--format", "json", "--output", &path,
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(parsed["command"], "fit");
}

#[test]
fn simulate_runs_coverage_config() {
    let cfg = write_temp(
        "cov.conf",
        "kind = coverage-fixed\nn = 60\nreps = 20\nb = 200\nalpha = 0.05\nseed = 4\n",
    );
    let out = run(&["simulate", "--input", &cfg, "--format", "json"]);
    assert!(out.status.success(), "{}", stderr_line(&out));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["method"], "residual");
    assert_eq!(parsed["reps"], 20);
    let coverage = parsed["coverage"].as_array().unwrap();
    assert_eq!(coverage.len(), 6);
    for c in coverage {
        let v = c.as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn seed_override_changes_simulate_output() {
    let cfg = write_temp("t1-small.conf", "kind = table1\nsizes = 60\nseed = 11\n");
    let base = run(&["simulate", "--input", &cfg]);
    let same = run(&["simulate", "--input", &cfg, "--seed", "11"]);
    let other = run(&["simulate", "--input", &cfg, "--seed", "12"]);
    assert!(base.status.success());
    assert_eq!(base.stdout, same.stdout);
    assert_ne!(base.stdout, other.stdout);
}
