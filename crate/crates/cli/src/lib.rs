//! Command-line driver for the trailrank pipeline.
//!
//! Each stage reads and writes plain files in a work directory, so any stage
//! can be rerun or inspected on its own.

pub mod config;
pub mod error;
pub mod pipeline;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use trailrank_core::embed::ProviderKind;
use trailrank_core::Execution;

pub use config::{PipelineConfig, ResolvedPaths};
pub use error::{FailureKind, PipelineError};
pub use pipeline::{Options, Pipeline, Stage, StageReport, StageStatus};

#[derive(Debug, Parser)]
#[command(name = "trailrank", version, about = "Describe hiking routes, rank them against queries and plot the result")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Pipeline config (TOML). Defaults to ./trailrank.toml when present.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Rerun stages even when their outputs are up to date.
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Seed for synthetic data and description wording.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub provider: Option<ProviderArg>,
    /// Write at most `max_rows` log-spaced ranks per curve.
    #[arg(long, global = true)]
    pub thin: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write a synthetic corpus from the [synth] section.
    Synth,
    /// Filter routes and compute their attributes.
    Attributes,
    /// Generate route descriptions.
    Describe,
    /// Embed descriptions and queries into the cache.
    Embed,
    /// Rank every description for every query.
    Rank,
    /// Write cumulative-mean curves, plots and a report.
    Evaluate,
    /// Run the whole chain.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderArg {
    Reference,
    Remote,
}

fn load_config(cli: &Cli) -> Result<(PipelineConfig, PathBuf, Option<PathBuf>), PipelineError> {
    let path = match &cli.config {
        Some(p) => Some(p.clone()),
        None => Some(PathBuf::from("trailrank.toml")).filter(|p| p.exists()),
    };
    let mut cfg = match &path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| PipelineError::usage("config", format!("cannot read {}: {e}", p.display())))?;
            PipelineConfig::parse(&text).map_err(|e| PipelineError::usage("config", format!("{}: {e}", p.display())))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.description.seed = seed;
        if let Some(s) = cfg.synth.as_mut() {
            s.seed = seed;
        }
    }
    if let Some(kind) = cli.provider {
        cfg.provider.kind = match kind {
            ProviderArg::Reference => ProviderKind::Reference,
            ProviderArg::Remote => ProviderKind::Remote,
        };
    }
    let path = path.map(|p| std::fs::canonicalize(&p).unwrap_or(p));
    let base = match path.as_deref().and_then(Path::parent) {
        Some(dir) => dir.to_path_buf(),
        None => std::env::current_dir().map_err(|e| PipelineError::usage("config", e))?,
    };
    Ok((cfg, base, path))
}

/// Runs one invocation and returns the stage reports.
pub fn run(cli: &Cli) -> Result<Vec<StageReport>, PipelineError> {
    let (cfg, base, config_file) = load_config(cli)?;
    let env_workdir = std::env::var_os(config::WORKDIR_ENV).map(PathBuf::from);
    let paths = ResolvedPaths::resolve(&cfg, &base, env_workdir);
    let exec = if cli.jobs == Some(1) { Execution::Sequential } else { Execution::default() };
    let opts = Options { force: cli.force, exec, thin: cli.thin };
    let pipeline = Pipeline::new(cfg, paths, config_file, opts);
    let stages = match cli.command {
        Command::Synth => vec![Stage::Synth],
        Command::Attributes => vec![Stage::Attributes],
        Command::Describe => vec![Stage::Describe],
        Command::Embed => vec![Stage::Embed],
        Command::Rank => vec![Stage::Rank],
        Command::Evaluate => vec![Stage::Evaluate],
        Command::All => pipeline.all_stages(),
    };
    match cli.jobs {
        Some(0) => Err(PipelineError::usage("pipeline", "--jobs must be at least 1")),
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| PipelineError::usage("pipeline", e))?;
            pool.install(|| pipeline.run(&stages))
        }
        _ => pipeline.run(&stages),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(_) => 0,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
