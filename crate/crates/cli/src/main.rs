//! Config-driven command-line front end for the bound laboratory.
//!
//! Every run is described by a TOML file; the command line only picks the
//! pipeline, overrides the seed or output directory, and sets execution
//! details (worker count, verbosity) that can never change the outputs.
//! Outputs are written atomically as a set: the manifest goes first and
//! data files follow only after the whole computation has succeeded.
//!
//! Exit codes: 0 success, 2 configuration error, 3 computation error,
//! 4 a measured excess risk escaped its bound bracket.

mod commands;
mod config;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use bayeslab_core::Error;
use clap::{Parser, Subcommand};

use crate::config::{CommandKind, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "bayeslab",
    version,
    about = "Excess-risk bounds, information estimates, and learning experiments",
    arg_required_else_help = true
)]
struct Cli {
    /// Path to the experiment configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides the master seed from the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Overrides the output directory from the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Number of worker threads (default: one per logical CPU).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Suppresses informational stdout lines.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Clone, Copy)]
enum CliCommand {
    /// Closed-form excess-risk bounds per sample size.
    Bounds,
    /// Mutual-information estimates per sample size.
    Mi,
    /// Rate-distortion curve of the discretised family.
    Rd,
    /// Bayesian learning trials checked against their bound sandwich.
    Simulate,
    /// Paired clean/noisy information-gap estimates.
    Noise,
    /// SVG summary plots from a previously written experiments table.
    Report,
}

impl CliCommand {
    fn kind(self) -> CommandKind {
        match self {
            CliCommand::Bounds => CommandKind::Bounds,
            CliCommand::Mi => CommandKind::Mi,
            CliCommand::Rd => CommandKind::Rd,
            CliCommand::Simulate => CommandKind::Simulate,
            CliCommand::Noise => CommandKind::Noise,
            CliCommand::Report => CommandKind::Report,
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_COMPUTE: u8 = 3;
const EXIT_BRACKET: u8 = 4;

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::BracketViolation { .. } => EXIT_BRACKET,
        _ => EXIT_COMPUTE,
    }
}

fn main() -> ExitCode {
    ExitCode::from(run_cli())
}

fn run_cli() -> u8 {
    let cli = Cli::parse();

    let Some(config_path) = &cli.config else {
        eprintln!("error: --config <PATH> is required");
        return EXIT_CONFIG;
    };
    let mut config = match ExperimentConfig::load(config_path) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let invoked = cli.command.kind();
    if invoked != config.command {
        eprintln!(
            "error: {} drives the '{}' pipeline but '{}' was invoked",
            config_path.display(),
            config.command.as_str(),
            invoked.as_str()
        );
        return EXIT_CONFIG;
    }

    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be at least 1");
        return EXIT_CONFIG;
    }

    // Compute everything up front; files are written only on full success.
    let outcome = match cli.workers {
        Some(workers) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: cannot build a {workers}-thread worker pool: {e}");
                    return EXIT_CONFIG;
                }
            };
            pool.install(|| commands::run(&config, cli.quiet))
        }
        None => commands::run(&config, cli.quiet),
    };
    let artifacts = match outcome {
        Ok(artifacts) => artifacts,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };

    // Persist the run: provenance first, then the data it explains.
    let dir = &config.output_dir;
    if let Err(e) = std::fs::create_dir_all(dir) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return EXIT_COMPUTE;
    }
    let manifest_name = format!("manifest_{}.toml", config.command.as_str());
    let manifest_text = manifest::render(&config.canonical_toml(), config.master_seed);
    let mut written = Vec::with_capacity(artifacts.len() + 1);
    written.push(manifest_name.clone());
    if let Err(e) = std::fs::write(dir.join(&manifest_name), manifest_text) {
        eprintln!("error: cannot write {manifest_name}: {e}");
        return EXIT_COMPUTE;
    }
    for artifact in &artifacts {
        if let Err(e) = std::fs::write(dir.join(&artifact.name), &artifact.content) {
            eprintln!("error: cannot write {}: {e}", artifact.name);
            return EXIT_COMPUTE;
        }
        written.push(artifact.name.clone());
    }
    if !cli.quiet {
        for name in written {
            println!("wrote {}", dir.join(name).display());
        }
    }
    0
}
