//! `rtq <kind> --config <file.json> [--out <file.csv>] [--compare]`
//!
//! Reads a JSON scenario, runs the requested computation (optionally sweeping
//! one parameter) and emits a deterministic CSV table. Exit codes: 0 success,
//! 2 configuration/schema violation, 3 domain error (the message carries a
//! stable machine-readable error name). RTQ_THREADS caps worker parallelism.

mod config;
mod run;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sha2::{Digest, Sha256};

use config::{Kind, ScenarioConfig};
use run::CliError;

#[derive(Parser)]
#[command(
    name = "rtq",
    about = "Thermodynamic performance of driven cavity fields",
    version
)]
struct Args {
    /// Computation kind: efficiency | battery | gw | oracle-check
    kind: String,
    /// JSON scenario configuration
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit closed-form vs general-pipeline columns side by side
    #[arg(long)]
    compare: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Schema(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain { name, message }) => {
            eprintln!("error: {name}: {message}");
            ExitCode::from(3)
        }
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    let kind = Kind::parse(&args.kind).ok_or_else(|| {
        CliError::Schema(format!(
            "kind: unknown kind '{}' (expected efficiency | battery | gw | oracle-check)",
            args.kind
        ))
    })?;

    init_thread_pool();

    let raw = std::fs::read(&args.config).map_err(|e| {
        CliError::Schema(format!("config: cannot read {}: {e}", args.config.display()))
    })?;
    let config: ScenarioConfig = serde_json::from_slice(&raw)
        .map_err(|e| CliError::Schema(format!("config: {e}")))?;
    config.validate(kind).map_err(CliError::Schema)?;

    let mut result = run::run(&config, args.compare)?;
    result
        .footer
        .push(format!("config_digest={}", hex_digest(&raw)));
    result
        .footer
        .push(format!("version={}", env!("CARGO_PKG_VERSION")));

    let csv = result.to_csv();
    match &args.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| {
            CliError::Schema(format!("out: cannot write {}: {e}", path.display()))
        })?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(feature = "parallel")]
fn init_thread_pool() {
    if let Ok(value) = std::env::var("RTQ_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                // ignore the error if the pool was already initialized
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn init_thread_pool() {}
