use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tscal_cli::config::ScenarioConfig;
use tscal_cli::consearch::run_con_search;
use tscal_cli::report::to_json_pretty;
use tscal_cli::run::{run_verify, RunError};
use tscal_cli::sweep::run_sweep;

/// Numerical verification harness for monotonicity rules of quotients of
/// integrals on time scales.
#[derive(Parser)]
#[command(name = "tscal", version)]
struct Cli {
    /// Override the monotonicity tolerance on consecutive samples.
    #[arg(long, global = true)]
    tol_mono: Option<f64>,
    /// Override the quadrature tolerance (recorded in the scenario echo;
    /// quadrature always runs at least this tight).
    #[arg(long, global = true)]
    tol_quad: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and report the verdict.
    Verify {
        /// Path to a JSON scenario file.
        config: PathBuf,
        /// Write the structured report here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the sampled quotient as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run randomized trials for one theorem family.
    Sweep {
        /// Theorem family id (e.g. thm1-1, nabla1-2, thm2-6).
        theorem: String,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Invert exactly one hypothesis per trial and expect detection.
        #[arg(long)]
        falsify: bool,
        /// Sample the quotient even when a hypothesis fails.
        #[arg(long)]
        force_sample: bool,
        /// Write the structured report here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for ladder ratio condition violations on generated scales.
    ConSearch {
        /// Scale generator: canonical-reals, canonical-q, random-q, or
        /// random-hybrid.
        #[arg(long)]
        generator: String,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the structured report here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<PathBuf>, body: String) -> Result<(), String> {
    match out {
        Some(path) => fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify { config, out, csv } => {
            let run = || -> Result<i32, String> {
                let src = fs::read_to_string(&config)
                    .map_err(|e| format!("{}: {e}", config.display()))?;
                let mut cfg = ScenarioConfig::from_str(&src).map_err(|e| e.to_string())?;
                if let Some(t) = cli.tol_mono {
                    cfg.tol_mono = Some(t);
                }
                if let Some(t) = cli.tol_quad {
                    cfg.tol_quad = Some(t);
                }
                let report = run_verify(cfg).map_err(|e| match e {
                    RunError::Config(c) => c.to_string(),
                    RunError::Runtime(m) => m,
                })?;
                if let Some(path) = csv {
                    let file = fs::File::create(&path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    report
                        .write_csv(file)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                }
                let exit = report.verdict.exit_code();
                emit(out, to_json_pretty(&report))?;
                Ok(exit)
            };
            run().unwrap_or_else(|msg| {
                eprintln!("error: {msg}");
                1
            })
        }
        Command::Sweep {
            theorem,
            trials,
            seed,
            falsify,
            force_sample,
            out,
        } => match run_sweep(&theorem, trials, seed, falsify, force_sample) {
            Ok(outcome) => match emit(out, to_json_pretty(&outcome.report)) {
                Ok(()) => outcome.exit_code,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    1
                }
            },
            Err(msg) => {
                eprintln!("error: {msg}");
                1
            }
        },
        Command::ConSearch {
            generator,
            trials,
            seed,
            out,
        } => match run_con_search(&generator, trials, seed) {
            Ok(report) => match emit(out, to_json_pretty(&report)) {
                Ok(()) => 0,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    1
                }
            },
            Err(msg) => {
                eprintln!("error: {msg}");
                1
            }
        },
    };
    ExitCode::from(code as u8)
}
