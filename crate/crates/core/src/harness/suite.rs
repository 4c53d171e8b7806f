//! The command-line suite: run a protocol over a grid of cells, optionally
//! verify its security measures, check every asserted invariant and write the
//! reports.
//!
//! Exit codes: 0 when every assertion holds, 1 on the first failed assertion
//! or internal invariant, 2 on invalid arguments, 3 on capacity errors.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{classical_rate, expected_download, quantum_rate, Costs, MetricsReport};
use crate::protocol::{
    run_classical_baseline, run_qspir, run_qspir_three_server, Backend, Mode, ProtocolConfig,
    ProtocolKind, ProtocolTranscript, Variant,
};
use crate::secrecy::{Cell, Checks, Scheme, SecurityReport};
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "QSPIR_WORKERS";
pub const DEFAULT_NS: [usize; 4] = [2, 3, 4, 5];
pub const DEFAULT_FS: [usize; 2] = [2, 3];
pub const DEFAULT_BLOCKS: [usize; 2] = [1, 2];
pub const BETA_TOLERANCE: f64 = 1e-9;
pub const LEMMA1_TOLERANCE: f64 = 1e-12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolArg {
    Qspir,
    Qspir3,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyArg {
    None,
    Error,
    User,
    Server,
    Lemma1,
    All,
}

impl VerifyArg {
    pub fn checks(self) -> Checks {
        let only = |error, user, server, lemma1| Checks {
            error,
            user,
            server,
            lemma1,
        };
        match self {
            VerifyArg::None => Checks::default(),
            VerifyArg::Error => only(true, false, false, false),
            VerifyArg::User => only(false, true, false, false),
            VerifyArg::Server => only(false, false, true, false),
            VerifyArg::Lemma1 => only(false, false, false, true),
            VerifyArg::All => Checks::ALL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Json,
    Csv,
    Both,
}

/// Runs and verifies the multi-server QSPIR protocol. Omitted `--n`, `--f`
/// or `--blocks` iterate over the default grid.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "qspir", version)]
pub struct SuiteArgs {
    #[arg(long, value_enum, default_value = "qspir")]
    pub protocol: ProtocolArg,
    /// Number of servers.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of files.
    #[arg(long)]
    pub f: Option<usize>,
    /// Number of blocks per file.
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Wanted file index; all indices when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "enumerate", value_parser = ["sample", "enumerate"])]
    pub mode: String,
    #[arg(long, default_value = "frame", value_parser = ["dense", "frame"])]
    pub backend: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "none")]
    pub verify: VerifyArg,
    /// Directory for report files; nothing is written when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Run a deliberately broken variant.
    #[arg(long, hide = true, value_parser = ["skip-correction", "leaky-query", "clear-h2"])]
    pub mutate: Option<String>,
}

impl SuiteArgs {
    fn mode(&self) -> Mode {
        self.mode.parse().expect("restricted by clap")
    }

    fn backend(&self) -> Backend {
        self.backend.parse().expect("restricted by clap")
    }

    fn variant(&self) -> Variant {
        self.mutate
            .as_deref()
            .map(|m| m.parse().expect("restricted by clap"))
            .unwrap_or_default()
    }

    fn kind(&self) -> ProtocolKind {
        match self.protocol {
            ProtocolArg::Qspir => ProtocolKind::Qspir,
            ProtocolArg::Qspir3 => ProtocolKind::Qspir3,
            ProtocolArg::Classical => ProtocolKind::Classical,
        }
    }

    fn scheme(&self) -> Scheme {
        match self.protocol {
            ProtocolArg::Classical => Scheme::Classical,
            _ => Scheme::Quantum(self.variant()),
        }
    }

    /// The cells to run, ordered by `(N, F, ℓ)`.
    pub fn cells(&self) -> crate::Result<Vec<Cell>> {
        let pick =
            |v: Option<usize>, default: &[usize]| v.map_or_else(|| default.to_vec(), |x| vec![x]);
        let (ns, blocks) = match self.protocol {
            ProtocolArg::Qspir3 => {
                if self.n.is_some_and(|n| n != 3) || self.blocks.is_some_and(|l| l != 1) {
                    return Err(Error::InvalidConfig(
                        "qspir3 runs with --n 3 and --blocks 1 only".into(),
                    ));
                }
                (vec![3], vec![1])
            }
            _ => (
                pick(self.n, &DEFAULT_NS),
                pick(self.blocks, &DEFAULT_BLOCKS),
            ),
        };
        if self.protocol == ProtocolArg::Classical && self.mutate.is_some() {
            return Err(Error::InvalidConfig(
                "--mutate applies to the quantum protocols".into(),
            ));
        }
        if self.protocol == ProtocolArg::Qspir3
            && !matches!(self.variant(), Variant::Qspir | Variant::LeakyQuery)
        {
            return Err(Error::InvalidConfig(format!(
                "qspir3 does not support --mutate {}",
                self.variant()
            )));
        }
        let fs = pick(self.f, &DEFAULT_FS);
        let mut cells = Vec::new();
        for &n in &ns {
            for &f in &fs {
                for &l in &blocks {
                    let cell = Cell::new(n, f, l).with_scheme(self.scheme());
                    cell.validate()?;
                    if let Some(k) = self.k {
                        if k == 0 || k > f {
                            return Err(Error::IndexOutOfRange { index: k, files: f });
                        }
                    }
                    cells.push(cell);
                }
            }
        }
        Ok(cells)
    }
}

/// One checked claim about one cell.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub n: usize,
    pub f: usize,
    pub blocks: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub args: SuiteArgs,
    pub status: &'static str,
    pub first_failure: Option<String>,
    pub cells: Vec<MetricsReport>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug)]
pub struct SuiteOutcome {
    pub code: i32,
    pub report: Option<SuiteReport>,
    /// Human-readable reason for a nonzero exit.
    pub message: Option<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::InvalidConfig(_) | Error::IndexOutOfRange { .. } => EXIT_USAGE,
        _ => EXIT_ASSERTION,
    }
}

fn failed(e: Error) -> SuiteOutcome {
    SuiteOutcome {
        code: exit_code(&e),
        report: None,
        message: Some(e.to_string()),
    }
}

/// Worker count from the environment, if set.
pub fn workers_from_env() -> crate::Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidConfig(format!(
                "{WORKERS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

pub fn run_suite(args: &SuiteArgs) -> SuiteOutcome {
    let cells = match args.cells() {
        Ok(c) => c,
        Err(e) => return failed(e),
    };
    let workers = match workers_from_env() {
        Ok(w) => w,
        Err(e) => return failed(e),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return failed(Error::InvalidConfig(e.to_string())),
    };
    let results: Vec<crate::Result<(MetricsReport, Vec<Assertion>)>> =
        pool.install(|| cells.par_iter().map(|c| run_cell(args, c)).collect());

    let mut metrics = Vec::new();
    let mut assertions = Vec::new();
    for r in results {
        match r {
            Ok((m, a)) => {
                metrics.push(m);
                assertions.extend(a);
            }
            Err(e) => return failed(e),
        }
    }
    let first_failure = assertions.iter().find(|a| !a.passed).map(|a| {
        format!(
            "{} (N={} F={} blocks={}): {}",
            a.name, a.n, a.f, a.blocks, a.detail
        )
    });
    let report = SuiteReport {
        schema: SCHEMA_VERSION,
        args: args.clone(),
        status: if first_failure.is_some() {
            "fail"
        } else {
            "pass"
        },
        first_failure: first_failure.clone(),
        cells: metrics,
        assertions,
    };
    if let Some(dir) = &args.out {
        if let Err(e) = write_reports(&report, dir, args.format) {
            return SuiteOutcome {
                code: EXIT_USAGE,
                report: Some(report),
                message: Some(format!("cannot write reports to {}: {e}", dir.display())),
            };
        }
    }
    SuiteOutcome {
        code: if first_failure.is_some() {
            EXIT_ASSERTION
        } else {
            EXIT_OK
        },
        report: Some(report),
        message: first_failure,
    }
}

fn run_protocol(
    args: &SuiteArgs,
    config: &ProtocolConfig,
) -> crate::Result<Vec<ProtocolTranscript>> {
    match args.protocol {
        ProtocolArg::Qspir => run_qspir(config),
        ProtocolArg::Qspir3 => run_qspir_three_server(config),
        ProtocolArg::Classical => Ok(vec![run_classical_baseline(config)?]),
    }
}

fn run_cell(args: &SuiteArgs, cell: &Cell) -> crate::Result<(MetricsReport, Vec<Assertion>)> {
    let (n, f, l) = (cell.n, cell.f, cell.blocks);
    let mut assertions = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        assertions.push(Assertion {
            name: name.into(),
            n,
            f,
            blocks: l,
            passed,
            detail,
        })
    };
    let ks: Vec<usize> = args.k.map_or_else(|| (1..=f).collect(), |k| vec![k]);
    let mut costs: Option<Costs> = None;
    let mut transcripts = 0u64;
    let mut wrong = 0u64;
    let mut consistent = true;
    for &k in &ks {
        let config = ProtocolConfig::random(n, f, l, k, args.seed)
            .with_mode(args.mode())
            .with_backend(args.backend())
            .with_variant(args.variant());
        let runs = run_protocol(args, &config)?;
        if args.mode() == Mode::Enumerate {
            let total = runs.iter().try_fold(BigRational::zero(), |acc, t| {
                t.branch_probability_exact.as_ref().map(|p| acc + p)
            });
            let float: f64 = runs.iter().map(|t| t.branch_probability).sum();
            let ok = match &total {
                Some(t) => t.is_one(),
                None => (float - 1.0).abs() < 1e-12,
            };
            check("branch_probabilities", ok, format!("K={k}: total {float}"));
        }
        for t in &runs {
            transcripts += 1;
            wrong += u64::from(!t.is_correct());
            let c = Costs::of(t);
            consistent &= costs.is_none_or(|prev| prev == c);
            costs.get_or_insert(c);
        }
    }
    let costs = costs.ok_or_else(|| Error::Invariant("protocol produced no transcript".into()))?;
    check(
        "correctness",
        wrong == 0,
        format!("{wrong} of {transcripts} transcripts retrieved the wrong file"),
    );
    check(
        "costs_consistent",
        consistent,
        "every run has the same cost".into(),
    );
    check(
        "upload_cost",
        costs.upload_bits == (n * f) as u64,
        format!("{} bits, expected {}", costs.upload_bits, n * f),
    );
    let kind = args.kind();
    let expected = expected_download(kind, n, l);
    check(
        "download_cost",
        costs.download_qubit_equivalents == expected,
        format!(
            "{} qubit-equivalents, expected {expected}",
            costs.download_qubit_equivalents
        ),
    );
    let want = if kind == ProtocolKind::Classical {
        classical_rate(n)
    } else {
        quantum_rate(n)
    };
    let rate = costs.rate(l);
    check(
        "rate",
        rate == want,
        format!("measured {rate}, expected {want}"),
    );

    let mut metrics = MetricsReport::new(n, f, l, costs);
    metrics.transcripts = transcripts;
    metrics.all_correct = wrong == 0;
    let checks = args.verify.checks();
    if checks != Checks::default() {
        let s = SecurityReport::measure(cell, checks, args.backend())?;
        if let Some(alpha) = s.alpha {
            let ok = match &s.alpha_exact {
                Some(e) => e == "0/1",
                None => alpha.abs() <= 1e-12,
            };
            check(
                "alpha_zero",
                ok,
                format!(
                    "alpha = {}",
                    s.alpha_exact.clone().unwrap_or_else(|| alpha.to_string())
                ),
            );
        }
        if let Some(gamma) = s.gamma {
            check(
                "gamma_zero",
                s.gamma_exact.as_deref() == Some("0"),
                format!(
                    "gamma = {} ({gamma} bits)",
                    s.gamma_exact.as_deref().unwrap_or("inexact")
                ),
            );
        }
        // The classical baseline makes no claim about the other files.
        if kind != ProtocolKind::Classical {
            if let Some(beta) = s.beta {
                check(
                    "beta_bound",
                    beta <= BETA_TOLERANCE,
                    format!("beta = {beta} bits, bound {BETA_TOLERANCE}"),
                );
            }
            if let Some(d) = s.lemma1_max_distance {
                check(
                    "lemma1_bound",
                    d <= LEMMA1_TOLERANCE,
                    format!("max trace distance {d}, bound {LEMMA1_TOLERANCE}"),
                );
            }
        }
        metrics = metrics.with_security(s);
    }
    Ok((metrics, assertions))
}

pub const CSV_COLUMNS: [&str; 20] = [
    "n",
    "f",
    "blocks",
    "alpha",
    "alpha_exact",
    "beta_bits",
    "gamma_bits",
    "gamma_exact",
    "lemma1_max_distance",
    "upload_bits",
    "download_qubit_equivalents",
    "raw_download_qubits",
    "raw_download_cbits",
    "rate",
    "rate_fraction",
    "rate_decimal",
    "theta_ratio",
    "theta_exact",
    "transcripts",
    "all_correct",
];

/// CSV cells rendered from the JSON values, so both formats carry the same
/// numbers character for character.
pub fn csv_row(m: &MetricsReport) -> Vec<String> {
    let v = serde_json::to_value(m).expect("metrics always serialize");
    CSV_COLUMNS
        .iter()
        .map(|&c| {
            let x = match c {
                "raw_download_qubits" => &v["raw_download"]["qubits"],
                "raw_download_cbits" => &v["raw_download"]["cbits"],
                _ => &v[c],
            };
            match x {
                serde_json::Value::Null => String::new(),
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            }
        })
        .collect()
}

pub fn to_csv(report: &SuiteReport) -> std::io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for m in &report.cells {
        w.write_record(csv_row(m))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

pub fn to_json(report: &SuiteReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}

fn write_reports(report: &SuiteReport, dir: &PathBuf, format: FormatArg) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    if matches!(format, FormatArg::Json | FormatArg::Both) {
        fs::write(dir.join("report.json"), to_json(report))?;
    }
    if matches!(format, FormatArg::Csv | FormatArg::Both) {
        fs::write(dir.join("report.csv"), to_csv(report)?)?;
    }
    Ok(())
}

/// One line per cell for the terminal.
pub fn summary(report: &SuiteReport) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
    let mut out = String::new();
    for m in &report.cells {
        out.push_str(&format!(
            "N={} F={} blocks={}  rate {}  upload {}  download {}  alpha {}  beta {}  gamma {}  lemma1 {}  correct {}\n",
            m.n,
            m.f,
            m.blocks,
            m.rate,
            m.upload_bits,
            m.download_qubit_equivalents,
            m.alpha_exact.clone().unwrap_or_else(|| opt(m.alpha)),
            opt(m.beta_bits),
            m.gamma_exact.clone().unwrap_or_else(|| opt(m.gamma_bits)),
            opt(m.lemma1_max_distance),
            m.all_correct,
        ));
    }
    out.push_str(&format!("status: {}\n", report.status));
    if let Some(f) = &report.first_failure {
        out.push_str(&format!("first failure: {f}\n"));
    }
    out
}

/// Parses `argv`, runs the suite, prints the summary and returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match SuiteArgs::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = run_suite(&args);
    if let Some(r) = &outcome.report {
        print!("{}", summary(r));
    } else if let Some(m) = &outcome.message {
        eprintln!("error: {m}");
    }
    if outcome.code != EXIT_OK && outcome.report.is_some() {
        if let Some(m) = &outcome.message {
            eprintln!("error: {m}");
        }
    }
    outcome.code
}
