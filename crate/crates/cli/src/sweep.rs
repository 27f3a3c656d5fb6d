//! Families of runs over one parameter, with trend and convergence verdicts.

use warplab_core::format::num;
use warplab_core::stats::{loglog_fit, monotone_direction};
use warplab_core::ProfileDescriptor;

use crate::config::{SuiteConfig, SuiteId, SweepParam};
use crate::error::{CliError, Result};
use crate::report::{Artifact, Check, Measurement, RunRecord};
use crate::suites::run_suite;

/// Minimum Richardson order accepted in grid sweeps.
pub const RICHARDSON_MIN_ORDER: f64 = 1.9;
/// Relative change below which a measurement counts as converged to roundoff.
pub const NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub param: SweepParam,
    /// Swept values in ascending order.
    pub values: Vec<f64>,
    pub records: Vec<RunRecord>,
    /// Flat-model run that curvature trends are measured against.
    pub reference: Option<RunRecord>,
    pub summary: RunRecord,
}

impl SweepOutcome {
    /// Header plus one row per swept value: member verdict and every trend quantity.
    pub fn trend_csv(&self) -> String {
        let names = trend_names(&self.records);
        let mut out = warplab_core::format::csv_line(
            [self.param.as_str().to_string(), "passed".into()].into_iter().chain(names.iter().cloned()),
        );
        for (v, r) in self.values.iter().zip(&self.records) {
            let row = [num(*v), r.passed().to_string()]
                .into_iter()
                .chain(names.iter().map(|n| trend_value(r, n).map_or(String::new(), num)));
            out.push_str(&warplab_core::format::csv_line(row));
        }
        out
    }

    /// Whitespace-delimited columns for plotting tools.
    pub fn plot_data(&self) -> String {
        let names = trend_names(&self.records);
        let mut out = format!("# {} {}\n", self.param.as_str(), names.join(" "));
        for (v, r) in self.values.iter().zip(&self.records) {
            let cols: Vec<String> = std::iter::once(num(*v))
                .chain(names.iter().map(|n| trend_value(r, n).map_or("nan".into(), num)))
                .collect();
            out.push_str(&cols.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code()
    }
}

fn trend_names(records: &[RunRecord]) -> Vec<String> {
    records.first().map(|r| r.trend.iter().map(|m| m.name.clone()).collect()).unwrap_or_default()
}

fn trend_value(r: &RunRecord, name: &str) -> Option<f64> {
    r.trend.iter().find(|m| m.name == name).map(|m| m.value)
}

/// Every refinable scalar of a record, keyed `check/quantity` (trend entries as `trend/name`).
fn refinable(r: &RunRecord) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = r
        .checks
        .iter()
        .flat_map(|c| c.values.iter().filter(|m| m.refinable).map(move |m| (format!("{}/{}", c.name, m.name), m.value)))
        .collect();
    out.extend(r.trend.iter().map(|m| (format!("trend/{}", m.name), m.value)));
    out
}

fn member_config(base: &SuiteConfig, param: SweepParam, value: f64, values: &[f64]) -> SuiteConfig {
    let mut c = base.with_param(param, value);
    if param == SweepParam::Grid {
        let coarsest = values.iter().cloned().fold(f64::INFINITY, f64::min);
        c.h_max = Some(base.radius / coarsest);
    }
    c
}

fn run_all(configs: &[SuiteConfig]) -> Vec<RunRecord> {
    std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run_suite(c))).collect();
        handles.into_iter().map(|h| h.join().expect("suite run panicked")).collect()
    })
}

/// Run `base` once per value of `param` and judge the resulting family.
pub fn sweep_family(
    base: &SuiteConfig,
    param: SweepParam,
    values: &[f64],
    expected_exponent: Option<f64>,
) -> Result<SweepOutcome> {
    if values.is_empty() {
        return Err(CliError::Invalid("sweep needs at least one value".into()));
    }
    let target = base.effective_suite();
    if target == SuiteId::Sweep {
        return Err(CliError::Invalid("sweep target must be a concrete suite".into()));
    }
    let mut values = values.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();

    let mut probe = base.clone();
    probe.sweep = Some(crate::config::SweepSpec { target, param, values: values.clone(), expected_exponent });
    probe.validate()?;

    let configs: Vec<SuiteConfig> = values.iter().map(|&v| member_config(base, param, v, &values)).collect();
    let records = run_all(&configs);

    let mut checks = Vec::new();
    checks.push(member_check(&records));
    let mut reference = None;
    match param {
        SweepParam::Kappa | SweepParam::Alpha => {
            let mut flat = base.with_param(param, values[0]);
            flat.geometry = ProfileDescriptor::Euclidean;
            let flat = run_suite(&flat);
            let xs: Vec<f64> = values.iter().map(|&v| if param == SweepParam::Alpha { 1.0 - v } else { v }).collect();
            checks.extend(trend_checks(&records, &flat, &xs, expected_exponent, base.tolerances.exponent));
            reference = Some(flat);
        }
        SweepParam::Grid => checks.push(richardson_check(&records, &values)?),
        SweepParam::KMax => checks.push(k_max_check(&records)),
    }

    let mut summary = RunRecord {
        suite: SuiteId::Sweep.as_str(),
        verifies: crate::suites::verifies(SuiteId::Sweep),
        geometry: records.first().map(|r| r.geometry.clone()).unwrap_or_default(),
        config_hash: probe.hash(),
        checks,
        trend: Vec::new(),
        artifacts: Vec::new(),
    };
    let mut outcome = SweepOutcome { param, values, records, reference, summary: summary.clone() };
    summary.artifacts = vec![
        Artifact { name: format!("sweep_{}_{}.csv", target.as_str(), param.as_str()), contents: outcome.trend_csv() },
        Artifact { name: format!("sweep_{}_{}.dat", target.as_str(), param.as_str()), contents: outcome.plot_data() },
    ];
    outcome.summary = summary;
    Ok(outcome)
}

fn member_check(records: &[RunRecord]) -> Check {
    let failed = records.iter().filter(|r| !r.passed()).count();
    let errored = records.iter().filter(|r| r.has_errors()).count();
    let c = Check::new("member_runs", true)
        .fixed("runs", records.len() as f64)
        .fixed("failed", failed as f64)
        .fixed("errored", errored as f64);
    if errored > 0 {
        Check { verdict: crate::report::Verdict::Error, ..c.note(format!("{errored} member run(s) hit solver errors")) }
    } else {
        c.judged(failed == 0)
    }
}

/// Monotonicity and scaling of `|q − q_flat|` against the curvature parameter `xs`.
fn trend_checks(records: &[RunRecord], flat: &RunRecord, xs: &[f64], expected: Option<f64>, tol: f64) -> Vec<Check> {
    let mut monotone = Check::new("trend_monotone", true);
    let mut exponent = Check::new("trend_exponent", expected.is_some());
    let mut all_monotone = true;
    let mut all_exponents = true;
    for name in trend_names(records) {
        let base = trend_value(flat, &name).unwrap_or(0.0);
        let ds: Vec<f64> =
            records.iter().map(|r| trend_value(r, &name).map_or(f64::NAN, |q| (q - base).abs())).collect();
        let scale = ds.iter().cloned().fold(0.0, f64::max);
        let up = monotone_direction(&ds, 1e-12 * scale) == Some(true) && ds.iter().all(|d| d.is_finite());
        all_monotone &= up;
        monotone = monotone
            .fixed(&format!("{name}_nondecreasing"), if up { 1.0 } else { 0.0 })
            .value(&format!("{name}_flat"), base);
        match loglog_fit(xs, &ds) {
            Some((slope, _)) => {
                all_exponents &= expected.is_none_or(|e| (slope - e).abs() <= tol);
                exponent = exponent.fixed(&name, slope);
            }
            None => {
                all_exponents &= expected.is_none();
                exponent = exponent.fixed(&name, f64::NAN);
            }
        }
    }
    if let Some(e) = expected {
        exponent = exponent.fixed("expected", e).fixed("tol", tol);
    }
    vec![monotone.judged(all_monotone), exponent.judged(all_exponents)]
}

/// Observed order of every refinable scalar over consecutive grid triples.
fn richardson_check(records: &[RunRecord], grids: &[f64]) -> Result<Check> {
    if grids.len() < 3 {
        return Err(CliError::Invalid("grid sweeps need at least three values".into()));
    }
    let ratio = grids[1] / grids[0];
    if grids.windows(2).any(|w| ((w[1] / w[0]) - ratio).abs() > 1e-12 * ratio) {
        return Err(CliError::Invalid("grid values must form a geometric sequence".into()));
    }
    let mut c = Check::new("richardson_order", true);
    let mut worst = f64::INFINITY;
    let series: Vec<Vec<(String, f64)>> = records.iter().map(refinable).collect();
    for (k, (name, _)) in series[0].iter().enumerate() {
        let mut min_order = f64::INFINITY;
        for w in series.windows(3) {
            let (a, b, f) = (w[0][k].1, w[1][k].1, w[2][k].1);
            let d0 = (a - b).abs();
            let d1 = (b - f).abs();
            let floor = NOISE_FLOOR * f.abs().max(1.0);
            let order = if d0 <= floor && d1 <= floor { f64::INFINITY } else { (d0 / d1).ln() / ratio.ln() };
            min_order = min_order.min(order);
        }
        worst = worst.min(min_order);
        c.values.push(Measurement { name: name.clone(), value: min_order, refinable: false });
    }
    let ok = worst >= RICHARDSON_MIN_ORDER;
    Ok(c.fixed("min_order", worst).note("infinite order marks a quantity converged to roundoff").judged(ok))
}

/// Successive `K_max` changes must shrink (or sit at roundoff).
fn k_max_check(records: &[RunRecord]) -> Check {
    let series: Vec<Vec<(String, f64)>> = records.iter().map(refinable).collect();
    let mut c = Check::new("k_max_convergence", records.len() >= 3);
    if records.len() < 3 {
        return c.skipped("needs at least three K_max values");
    }
    let mut ok = true;
    for (k, (name, _)) in series[0].iter().enumerate() {
        let first = (series[1][k].1 - series[0][k].1).abs();
        let n = series.len();
        let last = (series[n - 1][k].1 - series[n - 2][k].1).abs();
        let floor = NOISE_FLOOR * series[n - 1][k].1.abs().max(1.0);
        ok &= last <= first || last <= floor;
        c = c.fixed(name, last);
    }
    c.judged(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;
    use std::path::Path;

    fn cfg(text: &str) -> SuiteConfig {
        parse_config_str(text, Path::new(".")).unwrap()
    }

    #[test]
    fn empty_values_are_rejected() {
        let c = cfg("suite=comparison-deficits\nkind=sphere\nkappa=1");
        assert!(matches!(sweep_family(&c, SweepParam::Kappa, &[], None), Err(CliError::Invalid(_))));
    }

    #[test]
    fn comparison_deficits_scale_linearly_in_kappa() {
        let c = cfg("suite=comparison-deficits\nkind=sphere\nkappa=1\nn=3\nR=1\ngrid=512");
        let s = sweep_family(&c, SweepParam::Kappa, &[0.01, 0.05, 0.1, 0.5, 1.0], Some(1.0)).unwrap();
        assert_eq!(s.exit_code(), 0, "{}", s.summary.to_json());
        let csv = s.trend_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with("kappa,passed,"));
    }

    #[test]
    fn grid_sweep_needs_three_geometric_values() {
        let c = cfg("suite=green\nkind=sphere\nkappa=1\nn=2\nR=1\ngrid=256");
        assert!(sweep_family(&c, SweepParam::Grid, &[256.0, 512.0], None).is_err());
        assert!(sweep_family(&c, SweepParam::Grid, &[256.0, 512.0, 768.0], None).is_err());
    }
}
