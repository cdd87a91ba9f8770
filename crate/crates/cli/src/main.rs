//! `shiftflow` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

mod config;
mod error;
mod experiments;
mod report;

use config::Config;
use error::{CliError, Result};
use experiments::{Experiment, Format};

/// Numerical experiments on the continuous lattice shift.
///
/// Parameters come from `--config` (flat `key = value` lines) and from
/// trailing `key=value` arguments, which take precedence.
#[derive(Debug, Parser)]
#[command(name = "shiftflow", version)]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,

    /// Configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format; series default to csv, reports to json.
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Parameter overrides.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Config::parse(&text, &path.display().to_string())?
        }
        None => Config::default(),
    };
    for arg in &cli.overrides {
        config.apply_override(arg)?;
    }
    Ok(config)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let format = cli.format.unwrap_or(cli.experiment.default_format());
    if format == Format::Csv && !cli.experiment.has_table() {
        return Err(CliError::Usage(format!(
            "{} produces a report only; use --format json",
            cli.experiment.name()
        )));
    }
    let config = load_config(cli)?;
    let outcome = experiments::run(cli.experiment, &config)?;
    let text = match (format, &outcome.table) {
        (Format::Csv, Some(table)) => table.to_csv(),
        _ => outcome.report.to_json(),
    };
    write_output(cli.out.as_deref(), &text)?;
    for c in &outcome.report.checks {
        let value = c
            .value
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
        eprint!(
            "{} {} value={value} tolerance={:e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.tolerance
        );
        match &c.error {
            Some(e) => eprintln!(" error: {e}"),
            None => eprintln!(),
        }
    }
    Ok(outcome.report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("shiftflow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
