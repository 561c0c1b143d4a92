use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use tiltdiode_cli::analysis::fit_exponential;
use tiltdiode_cli::sweep::{summary_path, Table};
use tiltdiode_cli::{run_and_summarize, CliError, Result, RunOptions, Solver, Sweep, SweepConfig};

#[derive(Parser)]
#[command(name = "tiltdiode", version, about = "Steady-state transport sweeps for tilted interacting chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output; the JSON summary is written next to it.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Significant digits for the extended-precision solvers.
    #[arg(long)]
    digits: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Verify every Δ = 0 Lindblad point against the noninteracting solver.
    #[arg(long)]
    check_oracle: bool,
}

#[derive(Args)]
struct FitArgs {
    /// CSV produced by a sweep.
    #[arg(long)]
    input: PathBuf,
    /// Column used as x.
    #[arg(long, default_value = "n_sites")]
    x: String,
    /// Column holding the current; its absolute value is fitted.
    #[arg(long, default_value = "current")]
    y: String,
    /// JSON output; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver named in the configuration.
    Sweep(RunArgs),
    /// Lindblad steady states.
    Ness(RunArgs),
    /// Noninteracting correlation solver.
    Noninteracting(RunArgs),
    /// Dark-state ansatz reverse currents.
    Ansatz(RunArgs),
    /// Symmetry-sector spectra and avoided crossings.
    Spectrum(RunArgs),
    /// Driving through damped lead modes.
    Mesoleads(RunArgs),
    /// Exponential fit `ln |J| = a + b x` of two CSV columns.
    Fit(FitArgs),
}

fn run(args: &RunArgs, solver: Option<Solver>) -> Result<()> {
    let config = SweepConfig::load(&args.config)?;
    let options = RunOptions { digits: args.digits, threads: args.threads, check_oracle: args.check_oracle };
    let sweep = Sweep::new(config, solver, options)?;
    let summary = run_and_summarize(&sweep, &args.out)?;
    println!("{}", summary_path(&args.out).display());
    if summary.failed > 0 {
        return Err(CliError::PointsFailed { failed: summary.failed, total: summary.rows });
    }
    if summary.oracle_failures > 0 {
        return Err(CliError::PointsFailed { failed: summary.oracle_failures, total: summary.rows });
    }
    Ok(())
}

fn fit(args: &FitArgs) -> Result<()> {
    let table = Table::read(&args.input).map_err(|e| CliError::Config(e.to_string()))?;
    for col in [&args.x, &args.y] {
        if !table.has(col) {
            return Err(CliError::Config(format!("column '{col}' not in {}", args.input.display())));
        }
    }
    let series: Vec<(f64, f64)> = (0..table.rows.len())
        .filter_map(|i| Some((table.num(i, &args.x)?, table.num(i, &args.y)?.abs())))
        .collect();
    let fit = fit_exponential(&series)?;
    let json = serde_json::to_string_pretty(&fit).expect("plain struct");
    match &args.out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(a) => run(a, None),
        Command::Ness(a) => run(a, Some(Solver::Lindblad)),
        Command::Noninteracting(a) => run(a, Some(Solver::Noninteracting)),
        Command::Ansatz(a) => run(a, Some(Solver::Ansatz)),
        Command::Spectrum(a) => run(a, Some(Solver::Spectrum)),
        Command::Mesoleads(a) => run(a, Some(Solver::Mesoleads)),
        Command::Fit(a) => fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
