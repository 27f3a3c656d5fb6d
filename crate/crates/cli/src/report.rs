//! Run records and their deterministic JSON/CSV encodings.

use std::path::{Path, PathBuf};

use serde::Serialize;
use warplab_core::format::{csv_line, num, to_json};

use crate::config::ReportFormat;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// A solver error prevented the check.
    Error,
    /// Not applicable to this configuration.
    Skipped,
    /// Reported only; no inequality attached.
    Info,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
            Verdict::Skipped => "skipped",
            Verdict::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    /// Whether the value is expected to converge under grid refinement
    /// (locations and counts are not).
    #[serde(skip)]
    pub refinable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub hard: bool,
    pub verdict: Verdict,
    pub values: Vec<Measurement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &'static str, hard: bool) -> Self {
        Self { name, hard, verdict: Verdict::Info, values: Vec::new(), note: None }
    }

    pub fn value(mut self, name: &str, value: f64) -> Self {
        self.values.push(Measurement { name: name.to_string(), value, refinable: true });
        self
    }

    /// A grid location or count: reported but excluded from refinement studies.
    pub fn fixed(mut self, name: &str, value: f64) -> Self {
        self.values.push(Measurement { name: name.to_string(), value, refinable: false });
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Pass/fail from `ok` for hard checks; soft checks stay informational.
    pub fn judged(mut self, ok: bool) -> Self {
        self.verdict = match (self.hard, ok) {
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Fail,
            (false, _) => Verdict::Info,
        };
        self
    }

    pub fn skipped(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::Skipped;
        self.note = Some(why.into());
        self
    }

    pub fn error(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self { name, hard: true, verdict: Verdict::Error, values: Vec::new(), note: Some(err.to_string()) }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|m| m.name == name).map(|m| m.value)
    }
}

/// A file produced alongside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifact {
    pub name: String,
    #[serde(skip)]
    pub contents: String,
}

/// Outcome of one suite run. Wall-clock time is deliberately not recorded so
/// that identical configurations give byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub suite: &'static str,
    pub verifies: &'static str,
    pub geometry: String,
    pub config_hash: String,
    pub checks: Vec<Check>,
    /// Nonnegative deficits tracked across sweeps.
    pub trend: Vec<Measurement>,
    pub artifacts: Vec<Artifact>,
}

impl RunRecord {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn has_errors(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Error)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !(c.hard && matches!(c.verdict, Verdict::Fail | Verdict::Error)))
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(std::slice::from_ref(self))
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// One row per measurement (checks without values get one empty row).
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["suite", "config_hash", "check", "hard", "verdict", "quantity", "value"]);
        for c in &self.checks {
            let base = [
                self.suite.to_string(),
                self.config_hash.clone(),
                c.name.to_string(),
                c.hard.to_string(),
                c.verdict.as_str().into(),
            ];
            if c.values.is_empty() {
                out.push_str(&csv_line(base.iter().cloned().chain([String::new(), String::new()])));
            }
            for m in &c.values {
                out.push_str(&csv_line(base.iter().cloned().chain([m.name.clone(), num(m.value)])));
            }
        }
        out
    }
}

/// 0 all hard checks pass, 1 some hard check fails, 3 a solver error occurred.
pub fn exit_code(records: &[RunRecord]) -> i32 {
    if records.iter().any(RunRecord::has_errors) {
        3
    } else if records.iter().all(RunRecord::passed) {
        0
    } else {
        1
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    std::fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Write the record (and its artifacts) into `dir`; returns the files written.
pub fn emit_report(record: &RunRecord, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let body = match format {
        ReportFormat::Json => record.to_json(),
        ReportFormat::Csv => record.to_csv(),
    };
    let mut files = vec![write(dir.join(format!("{}.{}", record.suite, format.extension())), &body)?];
    for a in &record.artifacts {
        files.push(write(dir.join(&a.name), &a.contents)?);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(verdicts: &[(bool, Verdict)]) -> RunRecord {
        RunRecord {
            suite: "green",
            verifies: "test",
            geometry: "euclidean".into(),
            config_hash: "abc".into(),
            checks: verdicts
                .iter()
                .map(|&(hard, verdict)| Check { name: "x", hard, verdict, values: vec![], note: None })
                .collect(),
            trend: vec![],
            artifacts: vec![],
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(record(&[(true, Verdict::Pass), (false, Verdict::Info)]).exit_code(), 0);
        assert_eq!(record(&[(true, Verdict::Pass), (true, Verdict::Fail)]).exit_code(), 1);
        assert_eq!(record(&[(true, Verdict::Fail), (true, Verdict::Error)]).exit_code(), 3);
        assert_eq!(record(&[(true, Verdict::Skipped)]).exit_code(), 0);
    }

    #[test]
    fn csv_has_fixed_digits() {
        let mut r = record(&[]);
        r.checks.push(Check::new("flat_identity", true).value("sup", 0.125).judged(true));
        let csv = r.to_csv();
        assert!(csv.contains("green,abc,flat_identity,true,pass,sup,1.25000000000e-1\n"), "{csv}");
    }
}
