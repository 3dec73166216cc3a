//! Command-line front end: `gen`, `solve`, `reconstruct`, `resources`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 when a run
//! finished but did not converge or its energy carries unresolved phases.

pub mod commands;
pub mod config;
pub mod report;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::{DeserializeOwned, IntoDeserializer};
use sesq::encoding::EncodingMode;
use sesq::hamiltonian::InstanceFamily;
use sesq::measurement::Protocol;
use sesq::vqe::{AnsatzKind, CostProtocol};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, config keys or input files.
    Usage(String),
    /// Failure while running a valid request.
    Run(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Run(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Non-converged run or flagged diagnostics.
    Flagged,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Self::Success => 0,
            Self::Flagged => 2,
        }
    }
}

/// Parses a snake_case unit variant through its serde name.
pub fn parse_snake<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    T::deserialize(s.into_deserializer()).map_err(|e: serde::de::value::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "sesq", version, about = "Single-excitation subspace VQE: instances, solves, reconstruction and resource tables")]
pub struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a Hamiltonian file from a seeded instance family.
    Gen(GenArgs),
    /// Run a variational solve from a config file and/or flags.
    Solve(SolveArgs),
    /// Measure a state with a protocol and rebuild its profile and energy.
    Reconstruct(ReconstructArgs),
    /// Print the volumetric cost table for N sites.
    Resources(ResourcesArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// chain, random_hermitian or complex_ring.
    #[arg(long, value_parser = |s: &str| s.parse::<InstanceFamily>())]
    pub family: InstanceFamily,
    #[arg(long)]
    pub n_sites: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub hopping: f64,
    /// Width of the uniform on-site energy distribution.
    #[arg(long, default_value_t = 0.0)]
    pub disorder: f64,
    /// Total flux through the ring (complex_ring only).
    #[arg(long, default_value_t = 0.0)]
    pub flux: f64,
    /// Output file (default: `<out dir>/<family>_n<N>_seed<seed>.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct SolveArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "manifest")]
    pub config: Option<PathBuf>,
    /// Rerun the resolved configuration stored in a solve report.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Hamiltonian file; overrides `hamiltonian` in the config.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long, value_parser = parse_snake::<AnsatzKind>)]
    pub ansatz: Option<AnsatzKind>,
    #[arg(long, value_parser = parse_snake::<CostProtocol>)]
    pub protocol: Option<CostProtocol>,
    /// Shots per setting.
    #[arg(long, conflicts_with = "exact")]
    pub shots: Option<u64>,
    /// Force exact mode, dropping any configured shots.
    #[arg(long)]
    pub exact: bool,
    /// sequential, simplex or spsa (default hyperparameters).
    #[arg(long)]
    pub optimizer: Option<String>,
    #[arg(long)]
    pub max_evaluations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub penalty_strength: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Skip the CSV trace.
    #[arg(long)]
    pub no_trace_csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    /// Rerun the resolved request stored in a reconstruct report.
    #[arg(long, conflicts_with_all = ["hamiltonian", "ansatz", "params", "amplitudes"])]
    pub manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    pub hamiltonian: Option<PathBuf>,
    /// original or binary (default: from the ansatz, original for amplitude files).
    #[arg(long, value_parser = |s: &str| s.parse::<Protocol>())]
    pub protocol: Option<Protocol>,
    #[arg(long, value_parser = parse_snake::<AnsatzKind>, requires = "params")]
    pub ansatz: Option<AnsatzKind>,
    /// JSON `{"params": [...]}` for `--ansatz`.
    #[arg(long, requires = "ansatz")]
    pub params: Option<PathBuf>,
    /// JSON `{"amplitudes": [[re, im], ...]}` of per-site amplitudes.
    #[arg(long, conflicts_with_all = ["ansatz", "params"], required_unless_present_any = ["ansatz", "manifest"])]
    pub amplitudes: Option<PathBuf>,
    /// Site encoding for amplitude files under the binary protocol.
    #[arg(long, value_parser = parse_snake::<EncodingMode>, default_value = "shifted")]
    pub encoding: EncodingMode,
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    #[arg(long)]
    pub penalty_strength: Option<f64>,
    /// Shots per setting; omit for exact mode.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Report file (default: `<out dir>/reconstruct_report.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    #[arg(long, required_unless_present = "config")]
    pub n_sites: Option<u64>,
    /// Take N from a run configuration's Hamiltonian.
    #[arg(long, conflicts_with = "n_sites")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest N for which circuits are built and measured.
    #[arg(long, default_value_t = 4096)]
    pub measured_limit: u64,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // Ignore a second initialisation within one process (tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match cli.command {
        Command::Gen(a) => commands::gen::run(&a),
        Command::Solve(a) => commands::solve::run(&a),
        Command::Reconstruct(a) => commands::reconstruct::run(&a),
        Command::Resources(a) => commands::resources::run(&a),
    }
}
