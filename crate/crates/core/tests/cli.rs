//! The `qspir` binary: exit codes, report files and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qspir(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qspir"));
    cmd.args(args).env_remove("QSPIR_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn run_to(dir: &Path, args: &[&str]) -> (Output, Value) {
    let mut full = args.to_vec();
    let d = dir.to_str().unwrap();
    full.extend(["--out", d, "--format", "both"]);
    let out = qspir(&full, &[]);
    let json = fs::read_to_string(dir.join("report.json")).expect("report.json written");
    (out, serde_json::from_str(&json).unwrap())
}

#[test]
fn verified_four_server_run() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = run_to(
        dir.path(),
        &[
            "--protocol",
            "qspir",
            "--n",
            "4",
            "--f",
            "2",
            "--blocks",
            "1",
            "--mode",
            "enumerate",
            "--verify",
            "all",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report["schema"], 1);
    assert_eq!(report["status"], "pass");
    let cell = &report["cells"][0];
    assert_eq!(cell["rate"], "1/2");
    assert_eq!(cell["alpha_exact"], "0/1");
    assert_eq!(cell["gamma_exact"], "0");
    assert!(cell["beta_bits"].as_f64().unwrap() <= 1e-9);
    assert!(cell["lemma1_max_distance"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn three_servers_and_classical_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = run_to(
        dir.path(),
        &[
            "--protocol",
            "qspir",
            "--n",
            "3",
            "--f",
            "2",
            "--blocks",
            "3",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(report["cells"][0]["rate"], "1/2");
    assert_eq!(report["cells"][0]["download_qubit_equivalents"], 12);

    let (out, report) = run_to(
        dir.path(),
        &[
            "--protocol",
            "qspir3",
            "--n",
            "3",
            "--f",
            "2",
            "--verify",
            "all",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(report["cells"][0]["rate"], "1/2");

    let (out, report) = run_to(
        dir.path(),
        &[
            "--protocol",
            "classical",
            "--n",
            "4",
            "--f",
            "2",
            "--blocks",
            "1",
            "--verify",
            "error",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(report["cells"][0]["rate"], "1/4");
    assert_eq!(report["cells"][0]["alpha_exact"], "0/1");
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = run_to(
        dir.path(),
        &[
            "--n", "3", "--f", "3", "--blocks", "2", "--verify", "all", "--seed", "9",
        ],
    );
    assert_eq!(code(&out), 0);
    let mut rows = csv::Reader::from_path(dir.path().join("report.csv")).unwrap();
    let header = rows.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    let cells = report["cells"].as_array().unwrap();
    assert_eq!(rows.len(), cells.len());
    for (row, cell) in rows.iter().zip(cells) {
        for (col, text) in header.iter().zip(row.iter()) {
            let value = match col.strip_prefix("raw_download_") {
                Some(sub) => &cell["raw_download"][sub],
                None => &cell[col],
            };
            match value {
                Value::Null => assert_eq!(text, "", "{col}"),
                Value::String(s) => assert_eq!(text, s, "{col}"),
                Value::Number(n) => {
                    assert_eq!(text.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{col}")
                }
                Value::Bool(b) => assert_eq!(text, b.to_string(), "{col}"),
                other => panic!("{col}: unexpected {other}"),
            }
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "--n", "5", "--f", "3", "--blocks", "3", "--mode", "sample", "--seed", "42",
    ];
    args.extend([
        "--verify",
        "server",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "both",
    ]);
    let read = |file: &str| fs::read_to_string(dir.path().join(file)).unwrap();
    assert_eq!(code(&qspir(&args, &[])), 0);
    let first = (read("report.json"), read("report.csv"));
    assert_eq!(code(&qspir(&args, &[("QSPIR_WORKERS", "3")])), 0);
    assert_eq!(first, (read("report.json"), read("report.csv")));
}

#[test]
fn exit_codes() {
    let ok = qspir(&["--n", "2", "--f", "2", "--blocks", "1"], &[]);
    assert_eq!(code(&ok), 0);

    let broken = qspir(
        &[
            "--n",
            "3",
            "--f",
            "2",
            "--blocks",
            "1",
            "--mutate",
            "skip-correction",
        ],
        &[],
    );
    assert_eq!(code(&broken), 1);
    assert!(String::from_utf8_lossy(&broken.stderr).contains("correctness"));

    for bad in [
        vec!["--mode", "sometimes"],
        vec!["--protocol", "quantum"],
        vec!["--n", "3", "--f", "2", "--k", "5"],
        vec!["--n", "1"],
    ] {
        assert_eq!(code(&qspir(&bad, &[])), 2, "{bad:?}");
    }
    let workers = qspir(
        &["--n", "2", "--f", "2", "--blocks", "1"],
        &[("QSPIR_WORKERS", "zero")],
    );
    assert_eq!(code(&workers), 2);

    let big = qspir(
        &[
            "--n",
            "7",
            "--f",
            "2",
            "--blocks",
            "3",
            "--mode",
            "enumerate",
        ],
        &[],
    );
    assert_eq!(code(&big), 3, "{}", String::from_utf8_lossy(&big.stderr));
    let wide = qspir(
        &[
            "--n", "5", "--f", "3", "--blocks", "4", "--mode", "sample", "--verify", "lemma1",
        ],
        &[],
    );
    assert_eq!(code(&wide), 3, "{}", String::from_utf8_lossy(&wide.stderr));
}

#[test]
fn broken_variants_fail_their_assertions() {
    let dir = tempfile::tempdir().unwrap();
    for (mutation, verify, failing) in [
        ("leaky-query", "user", "gamma_zero"),
        ("clear-h2", "server", "beta_bound"),
        ("clear-h2", "lemma1", "lemma1_bound"),
    ] {
        let (out, report) = run_to(
            dir.path(),
            &[
                "--n", "3", "--f", "2", "--blocks", "1", "--verify", verify, "--mutate", mutation,
            ],
        );
        assert_eq!(code(&out), 1, "{mutation}");
        assert_eq!(report["status"], "fail");
        let failed: Vec<&str> = report["assertions"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|a| a["passed"] == false)
            .map(|a| a["name"].as_str().unwrap())
            .collect();
        assert!(failed.contains(&failing), "{mutation}: {failed:?}");
    }
}
