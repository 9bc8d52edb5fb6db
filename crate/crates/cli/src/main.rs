use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use ctcog::judgement::{Execution, Regime};
use ctcog_cli::commands::SEED_ENV;
use ctcog_cli::report::ReportResult;
use ctcog_cli::{cmd_check, cmd_simulate, cmd_sweep, parse_sweep, sweep_csv, CliError, Report, SimulateOptions};

#[derive(Parser)]
#[command(
    name = "ctcog",
    version,
    about = "Task possibility checks and conjunction-judgement simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Rational,
    Noisy,
    Quantum,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Rational => Regime::Rational,
            RegimeArg::Noisy => Regime::Noisy,
            RegimeArg::Quantum => Regime::Quantum,
        }
    }
}

#[derive(clap::Args)]
struct RunArgs {
    /// Overrides the scenario seed and CTCOG_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Judge subjects one after another instead of in parallel (output is identical).
    #[arg(long)]
    sequential: bool,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the variables and substrates of a model file.
    Check {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a cohort and report conjunction statistics.
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include per-subject records.
        #[arg(long)]
        records: bool,
        /// Check the regime's invariants and exit with status 1 if any fails.
        #[arg(long)]
        assert: bool,
    },
    /// Re-run a scenario over a range of one parameter; writes CSV.
    Sweep {
        scenario: PathBuf,
        /// NAME=START:STOP:STEP with NAME one of noise_rate, samples_per_subject, basis_angle.
        #[arg(long)]
        param: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(run: &RunArgs, records: bool, assert: bool) -> SimulateOptions {
    SimulateOptions {
        seed: run.seed,
        regime: run.regime.map(Into::into),
        records,
        assert,
        execution: if run.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        env_seed: std::env::var(SEED_ENV).ok(),
    }
}

fn stamp(mut report: Report, started: Instant, timing: bool) -> Report {
    if timing {
        report.wall_clock_ms = Some(started.elapsed().as_millis() as u64);
    }
    report
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Check { model, out } => {
            let report = cmd_check(&model)?;
            if out.is_some() {
                println!("{}", report.summary());
            }
            emit(&report.to_json(), out.as_deref())
        }
        Command::Simulate {
            scenario,
            run,
            out,
            records,
            assert,
        } => {
            let report = stamp(
                cmd_simulate(&scenario, &options(&run, records, assert))?,
                started,
                run.timing,
            );
            if out.is_some() {
                println!("{}", report.summary());
            } else {
                eprintln!("{}", report.summary());
            }
            emit(&report.to_json(), out.as_deref())?;
            match report.failed_assertions() {
                0 => Ok(()),
                n => Err(CliError::AssertionFailed(n)),
            }
        }
        Command::Sweep {
            scenario,
            param,
            run,
            out,
        } => {
            let spec = parse_sweep(&param)?;
            let report = stamp(
                cmd_sweep(&scenario, &spec, &options(&run, false, false))?,
                started,
                run.timing,
            );
            let ReportResult::Sweep(result) = &report.result else {
                unreachable!("sweep returns a sweep report")
            };
            emit(&sweep_csv(result)?, out.as_deref())?;
            eprintln!("{}", report.summary());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
