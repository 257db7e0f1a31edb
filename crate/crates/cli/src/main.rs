use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toponogov_cli::{catalog, run_file, RunOptions, RunReport};

#[derive(Parser)]
#[command(name = "toponogov", version, about = "Numerical triangle comparison on Finsler charts and model surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files; independent scenarios run in parallel.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Override the seed recorded in each scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Reports go to `<out-dir>/<scenario name>/`.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Multiply every check tolerance by this factor.
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
    /// Print the builtin surface and chart families.
    List,
    /// Summarize a `report.json` written by `run`.
    Report { file: PathBuf },
}

/// Writes to stdout, ignoring a closed pipe (`toponogov list | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            emit(&catalog::render());
            ExitCode::SUCCESS
        }
        Command::Report { file } => match RunReport::read(&file) {
            Ok(r) => {
                emit(&r.summary());
                if r.passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Run { files, seed, out_dir, tolerance_scale } => {
            if let Some(s) = tolerance_scale {
                if !(s > 0.0 && s.is_finite()) {
                    eprintln!("error: --tolerance-scale must be a positive number, got {s}");
                    return ExitCode::from(2);
                }
            }
            let opts = RunOptions { seed, tolerance_scale };
            let results = toponogov::parallel::map(&files, |f| run_file(f, &out_dir, &opts));
            let mut all_passed = true;
            let mut config_error = false;
            for (file, r) in files.iter().zip(results) {
                match r {
                    Ok((report, dir)) => {
                        emit(&report.summary());
                        emit(&format!("  wrote {}\n", dir.display()));
                        all_passed &= report.passed;
                    }
                    Err(e) => {
                        eprintln!("error: {}: {e}", file.display());
                        config_error = true;
                    }
                }
            }
            if config_error {
                ExitCode::from(2)
            } else if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
