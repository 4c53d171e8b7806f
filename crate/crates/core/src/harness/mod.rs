//! Reporting: per-cell metrics, rate and upload-cost tables, and the
//! command-line suite behind the `qspir` binary.

pub mod metrics;
pub mod suite;
pub mod tables;

pub use metrics::{
    classical_rate, expected_download, quantum_rate, Costs, MetricsReport, RawDownload,
};
pub use suite::{main_with, run_suite, Assertion, SuiteArgs, SuiteOutcome, SuiteReport};
pub use tables::{rate_table, strictly_decreasing, theta_trend, RateRow, ThetaPoint};
