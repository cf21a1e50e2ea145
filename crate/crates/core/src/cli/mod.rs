//! Config-driven command line: `build`, `run`, `sweep`, `phase-scan` and
//! `replay`. Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 numerical-invariant violation (including failed expected-state checks
//! and replay mismatches).

mod commands;
pub mod config;
pub mod meta;
mod plots;
mod sweep;
pub mod timeexpr;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::disorder::DisorderError;
use crate::dynamics::DynamicsError;
use crate::ensemble::EnsembleError;
use crate::network::NetworkError;
use crate::observables::ObservableError;
use crate::protocols::ProtocolError;

pub use config::Config;
pub use meta::RunMeta;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Dynamics(d) => d.into(),
            ProtocolError::Observable(o) => o.into(),
            ProtocolError::Network(NetworkError::Linalg(l)) => CliError::Numerical(l.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::NotNormalized(_) | DynamicsError::Linalg(_) => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ObservableError> for CliError {
    fn from(e: ObservableError) -> Self {
        match e {
            ObservableError::Dynamics(d) => d.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        ProtocolError::from(e).into()
    }
}

impl From<DisorderError> for CliError {
    fn from(e: DisorderError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::Protocol(p) => p.into(),
            EnsembleError::Observable(o) => o.into(),
            EnsembleError::Disorder(d) => d.into(),
            EnsembleError::NoRealizations => CliError::Config(e.to_string()),
            EnsembleError::ThreadPool(m) => CliError::Io(m),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spinnet", version, about = "Spin-network state transfer and entanglement simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed; overrides `seed` in the config (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (all cores when absent). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the fused network's edge list and spectrum.
    Build(Common),
    /// Run a protocol on the clean network and check its analytic states.
    Run(Common),
    /// Disorder heatmap over size and error strength.
    Sweep(Common),
    /// Phase-estimation accuracy across true phases.
    PhaseScan(Common),
    /// Re-run a recorded invocation and compare output hashes.
    Replay {
        /// `meta.json` written by an earlier run.
        metadata: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Where to write the re-run (default: `replay/` beside the metadata).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command needs once its config is loaded.
#[derive(Debug, Clone)]
pub struct Context {
    pub command: &'static str,
    pub config_text: String,
    pub config: Config,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: PathBuf,
}

impl Context {
    pub fn load(command: &'static str, common: &Common) -> Result<Self, CliError> {
        let text = fs::read_to_string(&common.config)
            .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
        Self::from_text(command, text, common.seed, common.workers, common.out.clone())
    }

    pub fn from_text(
        command: &'static str,
        config_text: String,
        seed: Option<u64>,
        workers: Option<usize>,
        out: PathBuf,
    ) -> Result<Self, CliError> {
        let config = Config::parse(&config_text).map_err(CliError::Config)?;
        let seed = seed.or(config.seed).unwrap_or(0);
        Ok(Self {
            command,
            config_text,
            config,
            seed,
            workers,
            out,
        })
    }
}

/// Output files a command produced, relative to the output directory, plus
/// metadata it wants recorded.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<String>,
    pub meta: meta::Extra,
    /// Set when outputs were written but an invariant failed.
    pub failure: Option<String>,
}

pub fn execute(ctx: &Context) -> Result<Outcome, CliError> {
    fs::create_dir_all(&ctx.out)?;
    let outcome = crate::ensemble::with_workers(ctx.workers, || match ctx.command {
        "build" => commands::build(ctx),
        "run" => commands::run(ctx),
        "sweep" => sweep::sweep(ctx),
        "phase-scan" => commands::phase_scan(ctx),
        other => Err(CliError::Config(format!("unknown command `{other}`"))),
    })??;
    meta::write(ctx, &outcome)?;
    Ok(outcome)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Build(_) => "build",
        Command::Run(_) => "run",
        Command::Sweep(_) => "sweep",
        Command::PhaseScan(_) => "phase-scan",
        Command::Replay { .. } => "replay",
    }
}

fn dispatch(cli: &Cli) -> Result<Option<String>, CliError> {
    match &cli.command {
        Command::Build(c) | Command::Run(c) | Command::Sweep(c) | Command::PhaseScan(c) => {
            let ctx = Context::load(command_name(&cli.command), c)?;
            let outcome = execute(&ctx)?;
            println!("wrote {} files to {}", outcome.files.len() + 1, ctx.out.display());
            Ok(outcome.failure)
        }
        Command::Replay { metadata, workers, out } => meta::replay(metadata, *workers, out.as_deref()),
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(None) => 0,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Write-temp-then-rename so readers never see a partial file.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".into(),
    });
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
