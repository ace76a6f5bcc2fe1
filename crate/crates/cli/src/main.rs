//! `cyclic-chern`: runs the property suites, writes Chern chains and
//! evaluates chains or maps on plots.
//!
//! Exit codes: 0 on success, 1 on malformed configuration or input, 2 when
//! a suite or comparison fails.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use config::{FileConfig, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Engine(#[from] cyclic_chern::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Parser, Debug)]
#[command(name = "cyclic-chern", version, about = "Exact cyclic Chern chains and transport numerics")]
struct Cli {
    /// TOML file with defaults for any flag; flags given explicitly win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run property suites and report pass/fail.
    Verify(VerifyArgs),
    /// Write the odd or even Chern chain of a unitary map.
    Chern(ChernArgs),
    /// Evaluate a chain or a map on a plot.
    Eval(EvalArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Highest order n.
    #[arg(long)]
    truncate: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    rk4_step: Option<f64>,
    #[arg(long)]
    quad_order: Option<usize>,
    #[arg(long)]
    seminorm_base: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// complex, chern, chen, degenerate, growth, bch or all (repeatable).
    #[arg(long)]
    suite: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Parity {
    Odd,
    Even,
}

#[derive(Args, Debug)]
struct ChernArgs {
    /// `corpus:<name>` or a unitary map file.
    #[arg(long)]
    map: Option<String>,
    #[arg(long, value_enum)]
    parity: Option<Parity>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Chain file (rho, tilde-rho, restrict).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Plot file.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// rho, tilde-rho, restrict, bch-ode, bch-iter or compare.
    #[arg(long)]
    mode: Option<String>,
    /// `corpus:<name>` or a unitary map file (bch modes, restrict coefficient).
    #[arg(long)]
    map: Option<String>,
    /// Degree index n of the odd component 2n − 1.
    #[arg(long)]
    degree: Option<usize>,
    #[command(flatten)]
    common: Common,
}

fn flags(common: Common) -> RunConfig {
    RunConfig {
        seed: common.seed,
        truncate: common.truncate,
        tolerance: common.tolerance,
        rk4_step: common.rk4_step,
        quad_order: common.quad_order,
        seminorm_base: common.seminorm_base,
        out: common.out,
        ..Default::default()
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Verify(a) => {
            let cfg = RunConfig::merge(
                RunConfig {
                    suites: a.suite,
                    ..flags(a.common)
                },
                file,
            );
            cfg.validate()?;
            commands::verify(&cfg)
        }
        Command::Chern(a) => {
            let parity = a.parity.map(|p| format!("{p:?}").to_lowercase());
            let cfg = RunConfig::merge(
                RunConfig {
                    map: a.map,
                    parity,
                    ..flags(a.common)
                },
                file,
            );
            cfg.validate()?;
            commands::chern(&cfg).map(|_| true)
        }
        Command::Eval(a) => {
            let cfg = RunConfig::merge(
                RunConfig {
                    input: a.input,
                    plot: a.plot,
                    mode: a.mode,
                    map: a.map,
                    degree: a.degree,
                    ..flags(a.common)
                },
                file,
            );
            cfg.validate()?;
            commands::eval(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
