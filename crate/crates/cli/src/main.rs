use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nep_cli::config::StudyConfig;
use nep_cli::verify::{run_verify, VerifyOptions};
use nep_cli::{run, CliError};

/// Nonlinear eigenvalue solver and first-order perturbation studies.
#[derive(Parser)]
#[command(name = "nep", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find all eigenvalues inside the configured contour (CSV on stdout).
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Print the canonical form of the parsed config and exit.
        #[arg(long)]
        dump_config: bool,
    },
    /// Evaluate the first-order correction at one perturbation size.
    Correct {
        #[arg(long)]
        config: PathBuf,
        /// Perturbation size h.
        #[arg(long)]
        h: f64,
        #[arg(long)]
        dump_config: bool,
    },
    /// Track the cluster over the h schedule and compare with predictions.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dump_config: bool,
    },
    /// Run the built-in verification suite.
    Verify {
        /// Run only the named check.
        #[arg(long)]
        only: Option<String>,
        /// Tighten tolerances drastically to demonstrate failing rows.
        #[arg(long)]
        debug_perturb_tolerances: bool,
    },
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve {
            config,
            dump_config,
        } => {
            let cfg = StudyConfig::load(&config)?;
            if dump_config {
                return Ok(cfg.dump());
            }
            run::run_solve(&cfg)
        }
        Command::Correct {
            config,
            h,
            dump_config,
        } => {
            let cfg = StudyConfig::load(&config)?;
            if dump_config {
                return Ok(cfg.dump());
            }
            run::run_correct(&cfg, h)
        }
        Command::Study {
            config,
            dump_config,
        } => {
            let cfg = StudyConfig::load(&config)?;
            if dump_config {
                return Ok(cfg.dump());
            }
            run::run_study(&cfg)
        }
        Command::Verify {
            only,
            debug_perturb_tolerances,
        } => {
            let (table, all_pass) = run_verify(&VerifyOptions {
                only,
                perturb_tolerances: debug_perturb_tolerances,
            })?;
            if all_pass {
                Ok(table)
            } else {
                // The table still prints; the exit code reports the failure.
                print!("{table}");
                Err(CliError {
                    code: 4,
                    message: "verification failures (see table)".into(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("nep: {}", err.message);
            ExitCode::from(err.code as u8)
        }
    }
}
