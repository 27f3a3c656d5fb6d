use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use warplab_cli::config::SweepSpec;
use warplab_cli::suites::{check_names, verifies};
use warplab_cli::{
    emit_report, parse_config, run_suite, sweep_family, CliError, ReportFormat, Result, RunRecord, SuiteConfig,
    SuiteId, SweepOutcome, SweepParam,
};

#[derive(Parser)]
#[command(name = "warplab", version, about = "Numerical checks of comparison-geometry estimates on model balls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suite described by a key=value config file.
    Verify {
        config: PathBuf,
        /// json or csv; overrides the config's `format`.
        #[arg(long)]
        format: Option<String>,
        /// Directory for the report and artifacts; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a config over a family of parameter values.
    Sweep {
        config: PathBuf,
        /// kappa, alpha, grid or k_max.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values.
        #[arg(long)]
        values: Option<String>,
        /// Expected power law of the trend quantities in the parameter.
        #[arg(long)]
        expected_exponent: Option<f64>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available suites and their checks.
    ListSuites,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::ListSuites => {
            for s in SuiteId::ALL {
                println!("{s}: {}", verifies(s));
                let names = check_names(s);
                if !names.is_empty() {
                    println!("    checks: {}", names.join(", "));
                }
            }
            Ok(0)
        }
        Command::Verify { config, format, out } => {
            let cfg = parse_config(&config)?;
            let (format, out) = output_settings(&cfg, format, out)?;
            match &cfg.sweep {
                Some(s) => {
                    let outcome = sweep_family(&cfg, s.param, &s.values, s.expected_exponent)?;
                    emit_sweep(&outcome, format, out.as_deref())
                }
                None => {
                    let record = run_suite(&cfg);
                    summarize(&record);
                    emit_single(&record, format, out.as_deref())?;
                    Ok(record.exit_code())
                }
            }
        }
        Command::Sweep { config, param, values, expected_exponent, format, out } => {
            let cfg = parse_config(&config)?;
            let (format, out) = output_settings(&cfg, format, out)?;
            let spec = sweep_spec(&cfg, param, values, expected_exponent)?;
            let outcome = sweep_family(&cfg, spec.param, &spec.values, spec.expected_exponent)?;
            emit_sweep(&outcome, format, out.as_deref())
        }
    }
}

fn output_settings(
    cfg: &SuiteConfig,
    format: Option<String>,
    out: Option<PathBuf>,
) -> Result<(ReportFormat, Option<PathBuf>)> {
    let format = match format {
        Some(f) => f.parse().map_err(CliError::Invalid)?,
        None => cfg.format,
    };
    Ok((format, out.or_else(|| cfg.out.clone())))
}

/// Command-line values take precedence over a `suite=sweep` config.
fn sweep_spec(
    cfg: &SuiteConfig,
    param: Option<String>,
    values: Option<String>,
    exponent: Option<f64>,
) -> Result<SweepSpec> {
    let from_file = cfg.sweep.clone();
    let param: SweepParam = match (param, &from_file) {
        (Some(p), _) => p.parse().map_err(CliError::Invalid)?,
        (None, Some(s)) => s.param,
        (None, None) => return Err(CliError::Invalid("--param is required unless the config has suite=sweep".into())),
    };
    let values = match (values, &from_file) {
        (Some(v), _) => v
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Invalid(format!("bad sweep value '{s}': {e}"))))
            .collect::<Result<Vec<f64>>>()?,
        (None, Some(s)) => s.values.clone(),
        (None, None) => return Err(CliError::Invalid("--values is required unless the config has suite=sweep".into())),
    };
    Ok(SweepSpec {
        target: cfg.effective_suite(),
        param,
        values,
        expected_exponent: exponent.or(from_file.and_then(|s| s.expected_exponent)),
    })
}

fn summarize(record: &RunRecord) {
    eprintln!("{} [{}] {}", record.suite, record.geometry, record.config_hash);
    for c in &record.checks {
        let hard = if c.hard { "hard" } else { "soft" };
        eprintln!("  {:<26} {:<4} {}", c.name, hard, c.verdict.as_str());
    }
}

fn emit_single(record: &RunRecord, format: ReportFormat, out: Option<&Path>) -> Result<()> {
    match out {
        Some(dir) => {
            for f in emit_report(record, format, dir)? {
                eprintln!("wrote {}", f.display());
            }
        }
        None => print!("{}", body(record, format)),
    }
    Ok(())
}

fn body(record: &RunRecord, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => record.to_json(),
        ReportFormat::Csv => record.to_csv(),
    }
}

fn emit_sweep(outcome: &SweepOutcome, format: ReportFormat, out: Option<&Path>) -> Result<i32> {
    summarize(&outcome.summary);
    match out {
        Some(dir) => {
            let mut files = emit_report(&outcome.summary, format, dir)?;
            let members = dir.join("members");
            for (i, r) in outcome.records.iter().enumerate() {
                let stem = format!("{}-{}-{i:02}", r.suite, outcome.param.as_str());
                files.extend(emit_report(r, format, &members.join(stem))?);
            }
            if let Some(r) = &outcome.reference {
                files.extend(emit_report(r, format, &members.join(format!("{}-flat-reference", r.suite)))?);
            }
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }
        None => match format {
            ReportFormat::Json => print!("{}", outcome.summary.to_json()),
            ReportFormat::Csv => print!("{}", outcome.trend_csv()),
        },
    }
    Ok(outcome.exit_code())
}
