use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use unravel_cli::config::RunConfig;
use unravel_cli::error::{CliError, Result};
use unravel_cli::output::Format;
use unravel_cli::{execute, write_artifacts, Command};

/// Quantum and classical Fisher information for collapse-model diffusion of a
/// continuously monitored oscillator.
#[derive(Debug, Parser)]
#[command(name = "unravel", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (default: one per core).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Closed-form steady state, purity, detectability and steady-state QFI.
    Steady(Common),
    /// Data for figure 1, 2, 3 or 4.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        #[command(flatten)]
        common: Common,
    },
    /// Grid sweep over parameters listed in the [sweep] section.
    Sweep(Common),
    /// Monte-Carlo ensemble of conditional trajectories.
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// Overrides trajectory.seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<()> {
    let (cmd, common) = match cli.command {
        Cmd::Steady(c) => (Command::Steady, c),
        Cmd::Figure { n, common } => (Command::Figure(n), common),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Trajectory { common, seed } => (Command::Trajectory { seed }, common),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cfg = RunConfig::load(common.config.as_deref(), std::env::vars())?;
    let artifacts = execute(cmd, &cfg)?;
    write_artifacts(&artifacts, common.out.as_deref(), common.format)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("unravel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
