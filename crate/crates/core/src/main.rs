use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wigneton::cli::{run, CliError, RunOptions, Task};

/// Wavelet-Galerkin Wigner-function solver and pattern diagnostics.
#[derive(Debug, Parser)]
#[command(name = "wigneton", version)]
struct Args {
    /// Task to run; must match the config's `task`.
    task: Task,
    /// Run config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.kind().as_str().map_or_else(|| e.to_string(), str::to_string);
            eprintln!("{}", CliError::config(None, msg).diagnostic());
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions { config_path: args.config, task: Some(args.task), out: args.out, seed: args.seed };
    match run(&opts) {
        Ok(summary) => {
            let line = serde_json::json!({
                "status": "ok",
                "task": summary.manifest.task,
                "dir": summary.dir,
                "artifacts": summary.manifest.artifacts.len(),
            });
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code())
        }
    }
}
