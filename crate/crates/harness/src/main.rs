use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gql_harness::{run, write_records, ExperimentConfig, Format, HarnessError};

#[derive(Parser)]
#[command(
    name = "gql",
    version,
    about = "Run seeded learner sweeps and emit per-trial records"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per grid point, overriding the config.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "GQL_THREADS", default_value_t = 0)]
    threads: usize,
    /// Record wall time per trial.
    #[arg(long)]
    timing: bool,
    /// Write a file even when there are no records.
    #[arg(long)]
    allow_empty: bool,
    /// Also write the summary as JSON to this path.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn execute(args: RunArgs) -> Result<bool, HarnessError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    config.timing |= args.timing;
    let output = run(&config, args.threads)?;
    match &args.out {
        Some(path) => write_records(path, args.format, &output.records, args.allow_empty)?,
        None => gql_harness::emit(&output.records, args.format, std::io::stdout().lock())?,
    }
    let summary = serde_json::to_string_pretty(&output.summary).expect("summary serializes");
    match &args.summary {
        Some(path) => std::fs::write(path, summary + "\n").map_err(|e| HarnessError::Io(e.to_string()))?,
        None if args.out.is_some() => println!("{summary}"),
        None => eprintln!("{summary}"),
    }
    Ok(output.summary.thresholds_met())
}

fn main() -> ExitCode {
    // GQL_THREADS is read through clap's env fallback, but the variable must
    // win over an explicit --threads as well.
    let cli = Cli::parse_from(override_threads(std::env::args_os().collect()));
    let Command::Run(args) = cli.command;
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("threshold violated");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Drops any `--threads` arguments when `GQL_THREADS` is set.
fn override_threads(args: Vec<std::ffi::OsString>) -> Vec<std::ffi::OsString> {
    if std::env::var_os("GQL_THREADS").is_none() {
        return args;
    }
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        match a.to_str() {
            Some("--threads") => skip = true,
            Some(s) if s.starts_with("--threads=") => {}
            _ => out.push(a),
        }
    }
    out
}
