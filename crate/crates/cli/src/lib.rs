//! Command-line toolkit around the z2sync library: instance generation,
//! solving, experiment sweeps, multiplex analysis, spectra, and manifest
//! replay.
//!
//! Every command writes a `manifest.json` holding the exact argument vector
//! it ran with; `z2sync replay --manifest <path>` reruns it to byte-identical
//! outputs.
//!
//! Exit codes: 0 ok, 2 usage error, 3 convergence failure, 4 I/O error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod manifest;

pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "z2sync", version, about = "Synchronization over Z2 on signed networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance and write it as CSV files.
    Generate(commands::generate::GenerateArgs),
    /// Solve an instance with one of the synchronization methods.
    Solve(commands::solve::SolveArgs),
    /// Run a named experiment preset and emit a tidy results CSV.
    Experiment(commands::experiment::ExperimentArgs),
    /// Assemble, transform and solve a multiplex voting data set.
    Multiplex(commands::multiplex::MultiplexArgs),
    /// Top eigenvalues and optional full-spectrum histogram of a graph.
    Spectrum(commands::spectrum::SpectrumArgs),
    /// Re-execute a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Path to a manifest.json written by a previous run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Redirect outputs to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Command-level error carrying the documented exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] z2sync::Error),
    #[error("{0}")]
    Format(#[from] z2sync::io::FormatError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(z2sync::Error::Convergence { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Format(_) => 4,
            CliError::Io(_) => 4,
            CliError::Json(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Runs a parsed command. `argv` is the raw argument vector (without the
/// binary name), recorded into the manifest for replay.
pub fn run(command: Command, argv: Vec<String>) -> CliResult<()> {
    match command {
        Command::Generate(args) => commands::generate::run(args, &argv),
        Command::Solve(args) => commands::solve::run(args, &argv),
        Command::Experiment(args) => commands::experiment::run(args, &argv),
        Command::Multiplex(args) => commands::multiplex::run(args, &argv),
        Command::Spectrum(args) => commands::spectrum::run(args, &argv),
        Command::Replay(args) => replay(args),
    }
}

fn replay(args: ReplayArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.manifest)?;
    let manifest: RunManifest = serde_json::from_str(&text)?;
    let mut argv = manifest.argv.clone();
    if let Some(out) = &args.out {
        override_out(&mut argv, out);
    }
    let mut full = vec!["z2sync".to_string()];
    full.extend(argv.iter().cloned());
    let cli = Cli::try_parse_from(&full)
        .map_err(|e| CliError::Usage(format!("manifest argv does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("refusing to replay a replay".into()));
    }
    let argv = full.split_off(1);
    run(cli.command, argv)
}

/// Replaces the value of `--out` in a recorded argument vector.
fn override_out(argv: &mut [String], out: &std::path::Path) {
    let mut i = 0;
    while i + 1 < argv.len() {
        if argv[i] == "--out" {
            argv[i + 1] = out.display().to_string();
            return;
        }
        i += 1;
    }
}
