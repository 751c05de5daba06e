use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockcs::harness::sweep::{write_summary_csv, write_trials_csv};
use blockcs::harness::theory_sweep::write_theory_csv;
use blockcs::harness::{parse_config, run_sweep, theory_sweep, TheoryKind};
use blockcs::{Execution, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "sweep",
    version,
    about = "Recovery and theory sweeps for weighted block-sparse recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo recovery sweep described by a config file.
    Recovery {
        #[arg(long)]
        config: PathBuf,
        /// Summary CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Also write one row per trial to `<out>.trials.csv`.
        #[arg(long)]
        per_trial: bool,
        /// Noise standard deviation, overriding the config.
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        sequential: bool,
    },
    /// Closed-form bound curves.
    Theory {
        #[arg(long, value_parser = parse_kind)]
        kind: TheoryKind,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Spacing of the grid over [0, 1].
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
}

fn parse_kind(s: &str) -> std::result::Result<TheoryKind, String> {
    s.parse().map_err(|e: blockcs::Error| e.to_string())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn trials_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".trials.csv");
    out.with_file_name(name)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Recovery {
            config,
            out,
            seed,
            trials,
            per_trial,
            noise,
            sequential,
        } => {
            let mut spec = parse_config(&fs::read_to_string(&config)?)?;
            if let Some(s) = seed {
                spec.base_seed = s;
            }
            if let Some(t) = trials {
                spec.trials = t;
            }
            if let Some(sigma) = noise {
                spec.sigma = sigma;
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            log::info!(
                "{} grid points x {} trials",
                spec.profiles.len() * spec.n_grid.len(),
                spec.trials
            );
            let result = run_sweep(&spec, exec)?;
            write_summary_csv(output(out.as_deref())?, &result.summary)?;
            if per_trial {
                let path = match &out {
                    Some(p) => trials_path(p),
                    None => PathBuf::from("sweep.trials.csv"),
                };
                write_trials_csv(BufWriter::new(File::create(&path)?), &result.trials)?;
                log::info!("per-trial rows written to {}", path.display());
            }
        }
        Command::Theory { kind, out, step } => {
            let rows = theory_sweep(kind, step)?;
            write_theory_csv(output(out.as_deref())?, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
