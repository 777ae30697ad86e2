mod config;
mod output;
mod run;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::ValidationError;
use crate::run::Mode;

/// Equilibria, collapse and balance curves of a Casimir-loaded membrane
/// pressure sensor.
#[derive(Debug, Parser)]
#[command(name = "nemsc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one config field, e.g. `--set roughness.plate="10 nm"`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Output directory.
    #[arg(long, default_value = ".", global = true)]
    out: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Locate and classify equilibria for each load pressure.
    Equilibria,
    /// Largest load pressure that still has an equilibrium.
    Collapse,
    /// Tabulate f(z) and the rough and smooth total pressures.
    Sweep,
    /// Voltage that places a stable equilibrium at calibrate.target_stable_root.
    CalibrateVoltage,
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ValidationError>() {
            return EXIT_VALIDATION;
        }
        if let Some(e) = cause.downcast_ref::<nems_casimir::Error>() {
            return match e {
                nems_casimir::Error::Io(_) => EXIT_IO,
                e if e.is_convergence() => EXIT_CONVERGENCE,
                _ => EXIT_VALIDATION,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let Format::Csv = cli.format;
    let mode = match cli.command {
        Command::Equilibria => Mode::Equilibria,
        Command::Collapse => Mode::Collapse,
        Command::Sweep => Mode::Sweep,
        Command::CalibrateVoltage => Mode::CalibrateVoltage,
    };
    let result = (|| -> anyhow::Result<Vec<PathBuf>> {
        let path = cli
            .config
            .as_ref()
            .ok_or_else(|| ValidationError("--config is required".into()))?;
        let config = config::load(path, &cli.overrides)?;
        run::run(mode, &config, &cli.out)
    })();
    match result {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
