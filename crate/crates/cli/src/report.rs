//! Run manifests and report writing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub os: String,
    pub arch: String,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Self { os: std::env::consts::OS.into(), arch: std::env::consts::ARCH.into(), threads: rayon::current_num_threads() }
    }
}

/// Embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config_path: Option<String>,
    /// Complete configuration after defaults and overrides.
    pub resolved_config: serde_json::Value,
    pub seed: u64,
    pub artifact_version: String,
    pub output_paths: Vec<String>,
    pub wall_time_s: f64,
    pub environment: Environment,
}

impl RunManifest {
    pub fn new(command: &str, config_path: Option<&Path>, resolved_config: serde_json::Value, seed: u64) -> Self {
        Self {
            command: command.into(),
            argv: std::env::args().collect(),
            config_path: config_path.map(|p| p.display().to_string()),
            resolved_config,
            seed,
            artifact_version: ARTIFACT_VERSION.into(),
            output_paths: Vec::new(),
            wall_time_s: 0.0,
            environment: Environment::current(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(value).map_err(|e| CliError::Run(format!("serialisation failed: {e}")))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    ensure_parent(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Run(format!("serialisation failed: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Run(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Run(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(())
}

pub fn display(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}
