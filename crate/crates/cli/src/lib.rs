//! Configuration-driven verification suites: parsing, execution, sweeps and
//! deterministic report emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod report;
pub mod suites;
pub mod sweep;

pub use config::{parse_config, parse_config_str, ReportFormat, SuiteConfig, SuiteId, SweepParam};
pub use error::{CliError, Result};
pub use report::{emit_report, exit_code, Check, RunRecord, Verdict};
pub use suites::run_suite;
pub use sweep::{sweep_family, SweepOutcome};
