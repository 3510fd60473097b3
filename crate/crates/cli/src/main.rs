use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crossmetric_cli::{list_checks, run, RunOptions, OUT_ENV};

#[derive(Parser)]
#[command(name = "crossmetric", version, about = "Run crossed-product quantum metric verification scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a scenario file and run its checks.
    Run {
        config: PathBuf,
        /// Output directory; defaults to the scenario's `output`, then `$CROSSMETRIC_OUT/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Largest word-metric ball (in elements) any check may enumerate.
        #[arg(long)]
        max_ball: Option<usize>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print every check with the statement it verifies.
    ListChecks,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListChecks => {
            for (name, statement) in list_checks() {
                println!("{name:<24} {statement}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed, max_ball, jobs } => {
            let opts = RunOptions { out, seed, max_ball, jobs };
            match run(&config, &opts) {
                Ok(summary) => {
                    for (name, pass) in &summary.results {
                        println!("{:<24} {}", name.as_str(), if *pass { "pass" } else { "FAIL" });
                    }
                    println!("reports written to {}", summary.out_dir.display());
                    if !summary.pass() {
                        eprintln!("failing checks: {}", summary.failing().join(", "));
                    }
                    ExitCode::from(summary.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    if matches!(e, crossmetric_cli::RunError::Io(_)) {
                        eprintln!("(set --out or {OUT_ENV} to choose another directory)");
                    }
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
