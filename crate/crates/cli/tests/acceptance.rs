//! Acceptance criterion for the command-line tool: repeating any run with
//! the same master seed must produce byte-identical CSV outputs whatever
//! the worker-pool size.

use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_bayeslab");

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name)
}

/// Runs one pipeline at the given worker count and returns the produced
/// CSV documents by file name, sorted.
fn run_pipeline(subcommand: &str, config_text: &str, workers: &str) -> Vec<(String, String)> {
    let config_path = tmp(&format!("{subcommand}_w{workers}.toml"));
    std::fs::create_dir_all(config_path.parent().unwrap()).unwrap();
    std::fs::write(&config_path, config_text).unwrap();
    let out_dir = tmp(&format!("{subcommand}_w{workers}"));

    let output = Command::new(BIN)
        .args([
            subcommand,
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--workers",
            workers,
            "--quiet",
        ])
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{subcommand} --workers {workers} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let mut tables = Vec::new();
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            tables.push((name, std::fs::read_to_string(&path).unwrap()));
        }
    }
    tables.sort();
    assert!(!tables.is_empty(), "{subcommand} produced no CSV output");
    tables
}

#[test]
fn criterion_9_same_seed_any_worker_count_byte_identical_csv() {
    let pipelines: [(&str, String); 5] = [
        (
            "simulate",
            "command = \"simulate\"\nmaster_seed = 4242\noutput_dir = 'x'\n\
             n_list = [4, 8, 16, 64]\n\n[family]\nkind = \"interval1d\"\n\n\
             [budgets]\ntrials = 150\n"
                .to_string(),
        ),
        (
            "mi",
            "command = \"mi\"\nmaster_seed = 4242\noutput_dir = 'x'\nn_list = [5, 20]\n\n\
             [family]\nkind = \"halfspace_angle2d\"\n\n[budgets]\nouter_mc = 400\n"
                .to_string(),
        ),
        (
            "noise",
            "command = \"noise\"\nmaster_seed = 4242\noutput_dir = 'x'\nn_list = [3, 12]\n\n\
             [family]\nkind = \"interval1d\"\n\n[budgets]\nouter_mc = 300\n\n\
             [noise]\nrho = 0.1\n"
                .to_string(),
        ),
        (
            "rd",
            "command = \"rd\"\nmaster_seed = 4242\noutput_dir = 'x'\n\n\
             [family]\nkind = \"interval1d\"\n\n\
             [budgets]\ngrid = 32\nba_slopes = [-1.0, -4.0]\ntol = 1e-3\n"
                .to_string(),
        ),
        (
            "bounds",
            "command = \"bounds\"\nmaster_seed = 4242\noutput_dir = 'x'\nn_list = [8, 64]\n\n\
             [family]\nkind = \"interval1d\"\n\n[noise]\nrho = 0.1\n"
                .to_string(),
        ),
    ];

    for (subcommand, config) in &pipelines {
        let single = run_pipeline(subcommand, config, "1");
        let pooled = run_pipeline(subcommand, config, "4");
        assert_eq!(
            single, pooled,
            "{subcommand}: CSV outputs differ between --workers 1 and --workers 4"
        );
    }
}
