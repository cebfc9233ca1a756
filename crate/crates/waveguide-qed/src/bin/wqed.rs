//! Command-line driver for JSON experiment configurations.
//!
//! Reads one configuration, runs it (or just validates it) and writes
//! result files into the output directory. Exit codes: 0 on success, 2
//! for configuration problems, 3 for numerical problems. Failures print
//! a single JSON object `{"error":{"code":...,"message":...}}` to
//! stderr so callers can dispatch on the code without parsing prose.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use waveguide_qed::runner;

#[derive(Parser)]
#[command(
    name = "wqed",
    version,
    about = "Runs waveguide QED experiments described by JSON configuration files"
)]
struct Cli {
    /// Path to the JSON experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Directory for result files; created if missing.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Worker thread count; defaults to the SIM_THREADS environment
    /// variable, then to one thread per core.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Check the configuration and print a JSON report without running.
    #[arg(long)]
    validate_only: bool,
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.validate_only {
        let report = runner::validate(&cli.config);
        match serde_json::to_string_pretty(&report) {
            Ok(text) => println!("{text}"),
            Err(e) => {
                eprintln!(
                    "{}",
                    serde_json::json!({"error": {"code": "json", "message": e.to_string()}})
                );
                return exit(2);
            }
        }
        return exit(report.exit_code);
    }

    match runner::run(&cli.config, &cli.out, cli.threads) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"code": e.code(), "message": e.to_string()}})
            );
            exit(e.exit_code())
        }
    }
}
