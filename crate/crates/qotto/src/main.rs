use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use qotto::cli::{commands, CliError, Dataset, Format, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Table,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
            OutputFormat::Table => Format::Table,
        }
    }
}

/// Noisy quantum Otto refrigerator: sweeps, cycle runs and ramp traces.
#[derive(Parser)]
#[command(name = "qotto", version, about)]
struct Cli {
    /// Flat key = value config file; flags below override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,

    /// Override the integrator tolerance (ode_tol).
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,

    /// Override the largest sweep-n cycle index (n_max).
    #[arg(long = "n-max", global = true, value_name = "INT")]
    n_max: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adiabaticity measures versus the frictionless cycle index.
    SweepN,
    /// Optimal cycle index and minimum temperature versus omega_h/omega_c.
    SweepRatio,
    /// Temperature bounds versus the cold frequency.
    Tmin,
    /// Solve the limit cycle and report heats, work and COP.
    RunCycle,
    /// Sample one expansion adiabat trajectory.
    AdiabatTrace,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };

    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::from_file(path) {
            Ok(cfg) => cfg,
            Err(e) => return fail(e),
        },
        None => RunConfig::default(),
    };
    if let Some(tol) = cli.tol {
        cfg.ode_tol = tol;
    }
    if let Some(n_max) = cli.n_max {
        cfg.n_max = n_max;
    }

    let outcome: Result<(Dataset, bool), CliError> = match cli.command {
        Command::SweepN => commands::sweep_n(&cfg).map(|d| (d, true)),
        Command::SweepRatio => commands::sweep_ratio(&cfg).map(|d| (d, true)),
        Command::Tmin => commands::tmin(&cfg).map(|d| (d, true)),
        Command::RunCycle => commands::run_cycle(&cfg),
        Command::AdiabatTrace => commands::adiabat_trace(&cfg).map(|d| (d, true)),
    };
    let (dataset, converged) = match outcome {
        Ok(v) => v,
        Err(e) => return fail(e),
    };

    if let Err(e) = emit(&dataset, cli.out.as_deref(), cli.format.into()) {
        return fail(e);
    }
    if converged {
        0
    } else {
        2
    }
}

fn emit(dataset: &Dataset, out: Option<&std::path::Path>, format: Format) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let mut writer = std::io::BufWriter::new(file);
            dataset.write(&mut writer, format)?;
            writer.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            dataset.write(&mut lock, format)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn fail(e: CliError) -> i32 {
    eprintln!("{e}");
    e.exit_code()
}
