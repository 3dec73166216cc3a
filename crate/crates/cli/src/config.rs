//! Run configuration (TOML) and its resolution into a complete snapshot.
//!
//! ```toml
//! [hamiltonian]
//! family = "chain"        # or: file = "h.json"
//! n_sites = 8
//! hopping = 1.0
//! disorder = 1.0
//! seed = 3
//!
//! [vqe]
//! ansatz = "one_hot_ses"
//! protocol = "original"   # defaults to the ansatz's protocol
//! # shots = 10000          # omit for exact mode
//! max_evaluations = 5000
//! seed = 7
//!
//! [vqe.optimizer]
//! kind = "sequential"     # simplex | spsa | sequential
//!
//! [output]
//! dir = "runs/chain8"
//! ```
//!
//! Every key that has a default is written back explicitly in the resolved
//! snapshot, so a snapshot reruns to the same result without the original
//! file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sesq::hamiltonian::{chain, complex_ring, random_hermitian, HamiltonianFile, InstanceFamily, PenaltyConfig, SiteHamiltonian};
use sesq::encoding::register_width;
use sesq::measurement::ShotMode;
use sesq::vqe::{AnsatzKind, CostProtocol, OptimizerConfig, VqeConfig};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SESQ_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "sesq-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianSpec,
    #[serde(default)]
    pub vqe: VqeSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<InstanceFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(default = "one")]
    pub hopping: f64,
    #[serde(default)]
    pub disorder: f64,
    #[serde(default)]
    pub flux: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeSection {
    #[serde(default = "default_ansatz")]
    pub ansatz: AnsatzKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<CostProtocol>,
    /// Shots per setting; absent means exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerConfig>,
    #[serde(default = "default_budget")]
    pub max_evaluations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Used only when a hardware-efficient register has unused codewords.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_strength: Option<f64>,
}

fn default_ansatz() -> AnsatzKind {
    AnsatzKind::OneHotSes
}
fn default_budget() -> usize {
    5000
}
fn default_layers() -> usize {
    2
}
fn default_tolerance() -> f64 {
    1e-3
}

impl Default for VqeSection {
    fn default() -> Self {
        Self {
            ansatz: default_ansatz(),
            protocol: None,
            shots: None,
            optimizer: None,
            max_evaluations: default_budget(),
            seed: 0,
            layers: default_layers(),
            tolerance: default_tolerance(),
            epsilon: None,
            penalty_strength: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Also write the trace as CSV.
    #[serde(default = "yes")]
    pub trace_csv: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: None, trace_csv: true }
    }
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<Self, CliError> {
        toml::from_str(src).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&src)?;
        // Relative Hamiltonian paths are relative to the config file.
        if let (Some(f), Some(dir)) = (&cfg.hamiltonian.file, path.parent()) {
            if f.is_relative() {
                cfg.hamiltonian.file = Some(dir.join(f));
            }
        }
        Ok(cfg)
    }

    /// Fills defaults that depend on other keys and returns the Hamiltonian.
    pub fn resolve(&mut self) -> Result<SiteHamiltonian, CliError> {
        let h = self.hamiltonian.load()?;
        if let Some(f) = &self.hamiltonian.file {
            self.hamiltonian.file = Some(std::path::absolute(f).unwrap_or_else(|_| f.clone()));
        }
        let v = &mut self.vqe;
        v.protocol.get_or_insert(match v.ansatz {
            AnsatzKind::OneHotSes => CostProtocol::Original,
            _ => CostProtocol::Binary,
        });
        let shots = shot_mode(v.shots)?;
        v.optimizer.get_or_insert(OptimizerConfig::default_for(shots));
        let n = register_width(h.n_sites());
        if v.ansatz == AnsatzKind::HardwareEfficient && (1usize << n) != h.n_sites() && v.penalty_strength.is_none() {
            v.penalty_strength = Some(h.default_penalty_strength().map_err(|e| CliError::Run(e.to_string()))?);
        }
        Ok(h)
    }

    /// Core configuration; call after [`Self::resolve`].
    pub fn vqe_config(&self, h: &SiteHamiltonian) -> Result<VqeConfig, CliError> {
        let v = &self.vqe;
        let penalty = match v.penalty_strength {
            Some(s) => Some(PenaltyConfig::new(s, register_width(h.n_sites())).map_err(|e| CliError::Usage(format!("vqe.penalty_strength: {e}")))?),
            None => None,
        };
        let shots = shot_mode(v.shots)?;
        Ok(VqeConfig {
            ansatz: v.ansatz,
            protocol: v.protocol.unwrap_or(CostProtocol::Original),
            shots,
            optimizer: v.optimizer.unwrap_or(OptimizerConfig::default_for(shots)),
            max_evaluations: v.max_evaluations,
            seed: v.seed,
            penalty,
            layers: v.layers,
            epsilon: v.epsilon,
            tolerance: v.tolerance,
        })
    }

    /// `--out-dir` > `output.dir` > `$SESQ_OUT_DIR` > `sesq-out`.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        resolve_out_dir(flag.or(self.output.dir.as_deref()))
    }
}

pub fn resolve_out_dir(explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
    }
}

pub fn shot_mode(shots: Option<u64>) -> Result<ShotMode, CliError> {
    match shots {
        None => Ok(ShotMode::Exact),
        Some(0) => Err(CliError::Usage("vqe.shots must be at least 1 (omit it for exact mode)".into())),
        Some(s) => Ok(ShotMode::Shots(s)),
    }
}

impl HamiltonianSpec {
    pub fn load(&self) -> Result<SiteHamiltonian, CliError> {
        match (&self.file, self.family, self.n_sites) {
            (Some(path), None, None) => load_hamiltonian(path),
            (None, Some(family), Some(n)) => generate(family, n, self.hopping, self.disorder, self.flux, self.seed),
            (None, Some(_), None) => Err(CliError::Usage("hamiltonian.n_sites is required with hamiltonian.family".into())),
            (None, None, _) => Err(CliError::Usage("hamiltonian needs either `file` or `family` + `n_sites`".into())),
            (Some(_), _, _) => Err(CliError::Usage("hamiltonian.file cannot be combined with family/n_sites".into())),
        }
    }
}

pub fn generate(family: InstanceFamily, n: usize, hopping: f64, disorder: f64, flux: f64, seed: u64) -> Result<SiteHamiltonian, CliError> {
    if n == 0 {
        return Err(CliError::Usage("n_sites must be at least 1".into()));
    }
    if n > 4096 {
        return Err(CliError::Usage(format!("n_sites = {n} exceeds the dense limit of 4096")));
    }
    let h = match family {
        InstanceFamily::Chain => chain(n, hopping, disorder, seed),
        InstanceFamily::RandomHermitian => random_hermitian(n, seed),
        InstanceFamily::ComplexRing => complex_ring(n, hopping, flux, disorder, seed),
    };
    h.map_err(|e| CliError::Usage(e.to_string()))
}

pub fn load_hamiltonian(path: &Path) -> Result<SiteHamiltonian, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    HamiltonianFile::from_json(&src)
        .and_then(|f| f.to_hamiltonian())
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
