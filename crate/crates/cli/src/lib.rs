//! Config-driven experiment runner.
//!
//! `combsync <command> --config <file> [--seed N] [--out DIR]` reads a TOML
//! experiment description, runs one of the core modules and writes CSV and
//! TOML artifacts. Every artifact starts with a comment line carrying the
//! SHA-256 of the config file and the seed in effect.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::Parser;
use thiserror::Error;

pub use config::{Command, ExperimentConfig};
pub use output::emit_sigma_tau;

#[derive(Debug, Parser)]
#[command(name = "combsync", version, about = "Timing and synchronization experiments")]
pub struct Cli {
    pub command: Command,
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the config's `output_path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(#[from] combsync_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

/// Everything a command needs besides its own section.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub command: Command,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    /// Directory of the config file, for resolving relative inputs.
    pub base_dir: PathBuf,
    /// Hex SHA-256 of the config bytes.
    pub config_hash: String,
}

impl RunContext {
    /// First line of every artifact, without the comment marker.
    pub fn provenance(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("config_sha256={} seed={}", self.config_hash, seed)
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::Config(format!(
                "command `{}` is stochastic and needs a seed (config `seed` or --seed)",
                self.command.name()
            ))
        })
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn config_hash(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

/// Runs one command and returns the paths of the files it wrote.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let bytes = std::fs::read(&cli.config).map_err(|e| CliError::io(&cli.config, e))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Config(format!("{} is not UTF-8: {e}", cli.config.display())))?;
    let config = parse_config(text)?;
    if let Some(declared) = config.command {
        if declared != cli.command {
            return Err(CliError::Config(format!(
                "config declares command `{}` but `{}` was requested",
                declared.name(),
                cli.command.name()
            )));
        }
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output_path.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let ctx = RunContext {
        command: cli.command,
        seed: cli.seed.or(config.seed),
        out_dir,
        base_dir: cli
            .config
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default(),
        config_hash: config_hash(&bytes),
    };
    log::info!("running `{}` ({})", ctx.command.name(), ctx.provenance());
    commands::dispatch(&config, &ctx)
}
