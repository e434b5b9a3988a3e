//! `dftbeam`: run, sweep and count for DFT-codebook hybrid beamforming experiments.
//!
//! Exit status is 0 on success, 2 for invalid input and 1 for runtime failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dftbeam_core::experiment::{
    emit, run_experiment, sweep, to_csv_string, to_json_string, ExperimentConfig, OutputFormat, ResultRow, SweepAxis,
};
use dftbeam_core::selection::{comparison_count, SelectionScheme};
use dftbeam_core::Error;

#[derive(Parser)]
#[command(name = "dftbeam", version, about = "DFT-codebook hybrid beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run(RunArgs),
    /// Run the config once per value of one axis.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values, e.g. `-10,0,10,20`.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Print the number of comparisons a selection scheme needs.
    Count {
        #[arg(long, value_enum)]
        scheme: CountScheme,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ns: usize,
        #[arg(long)]
        nu: usize,
        /// Two-step margin.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    drops: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Snr,
    #[value(name = "k_db")]
    KDb,
    #[value(name = "margin_n")]
    MarginN,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountScheme {
    Exhaustive,
    #[value(name = "per_user", alias = "per-user")]
    PerUser,
    #[value(name = "two_step", alias = "two-step")]
    TwoStep,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(drops) = args.drops {
        cfg.drops = drops;
    }
    if let Some(output) = &args.output {
        cfg.output = Some(output.clone());
    }
    if let Some(format) = args.format {
        cfg.format = match format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    Ok(cfg)
}

fn write_rows(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => emit(rows, cfg.format, path)?,
        None => {
            let body = match cfg.format {
                OutputFormat::Csv => to_csv_string(rows),
                OutputFormat::Json => to_json_string(rows),
            };
            std::io::stdout()
                .lock()
                .write_all(body.as_bytes())
                .map_err(|e| Failure::Runtime(format!("writing to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn count(scheme: CountScheme, m: usize, ns: usize, nu: usize, n: usize) -> Result<String, Failure> {
    if nu == 0 || ns < nu || m < ns {
        return Err(Failure::Invalid(format!("need 1 <= nu <= ns <= m, got m={m}, ns={ns}, nu={nu}")));
    }
    let scheme = match scheme {
        CountScheme::Exhaustive => SelectionScheme::Exhaustive,
        CountScheme::PerUser => SelectionScheme::PerUser,
        CountScheme::TwoStep => {
            if n == 0 {
                return Err(Failure::Invalid("margin n must be at least 1".into()));
            }
            SelectionScheme::TwoStep
        }
    };
    Ok(comparison_count(scheme, m, ns, nu, n).to_string())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => {
            let cfg = load(&args)?;
            cfg.validate()?;
            let rows = run_experiment(&cfg)?;
            write_rows(&cfg, &rows)
        }
        Command::Sweep { run, axis, values } => {
            let cfg = load(&run)?;
            cfg.validate()?;
            let axis = match axis {
                Axis::Snr => SweepAxis::Snr,
                Axis::KDb => SweepAxis::KDb,
                Axis::MarginN => SweepAxis::MarginN,
            };
            let values = values
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Invalid(format!("--values `{values}`: {e}")))?;
            let rows = sweep(&cfg, axis, &values)?;
            write_rows(&cfg, &rows)
        }
        Command::Count { scheme, m, ns, nu, n } => {
            println!("{}", count(scheme, m, ns, nu, n)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
