use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sesq::encoding::{EncodingMap, EncodingMode};
use sesq::hamiltonian::SiteHamiltonian;
use sesq::measurement::{estimate_energy, EnergyEstimate, ObservableId, Protocol, ShotMode};
use sesq::vqe::{AnsatzKind, CostProtocol, OptimizerConfig, Problem, VqeConfig};
use sesq::{SparseState, StateVector};

use crate::config::{load_hamiltonian, resolve_out_dir, shot_mode};
use crate::report::{display, to_json, write_json, RunManifest};
use crate::{CliError, Outcome, ReconstructArgs};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    params: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudesFile {
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct SettingRow {
    label: String,
    basis: String,
    shots: u64,
    unknown_outcomes: u64,
    /// `P(j)`, `C(j,k)` and `S(j,k)` keyed values.
    estimates: BTreeMap<String, f64>,
}

fn observable_key(id: ObservableId) -> String {
    match id {
        ObservableId::Population(j) => format!("P({j})"),
        ObservableId::Cos(j, k) => format!("C({j},{k})"),
        ObservableId::Sin(j, k) => format!("S({j},{k})"),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&src).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Estimate and noiseless oracle energy for per-site amplitudes.
fn from_amplitudes(
    a: &ReconstructArgs,
    h: &SiteHamiltonian,
    path: &Path,
    protocol: Protocol,
    mode: ShotMode,
) -> Result<(EnergyEstimate, f64), CliError> {
    let file: AmplitudesFile = read_json(path)?;
    let amps: Vec<Complex64> = file.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    if amps.len() != h.n_sites() {
        return Err(CliError::Usage(format!(
            "{}: {} amplitudes for a {}-site Hamiltonian",
            path.display(),
            amps.len(),
            h.n_sites()
        )));
    }
    let oracle = h.expectation(&amps);
    let est = match protocol {
        Protocol::Original => {
            let s = SparseState::one_hot(&amps).map_err(usage)?;
            estimate_energy(h, &s, protocol, None, mode, a.seed, a.epsilon)
        }
        Protocol::Binary => {
            let map = EncodingMap::build(h.n_sites(), a.encoding).map_err(usage)?;
            let mut v = vec![Complex64::new(0.0, 0.0); 1usize << map.width()];
            for (k, &z) in amps.iter().enumerate() {
                v[map.codeword(k).bits as usize] = z;
            }
            let s = StateVector::from_amplitudes(v).map_err(usage)?;
            estimate_energy(h, &s, protocol, Some(&map), mode, a.seed, a.epsilon)
        }
    };
    Ok((est.map_err(|e| CliError::Run(e.to_string()))?, oracle))
}

fn from_ansatz(
    a: &ReconstructArgs,
    h: &SiteHamiltonian,
    ansatz: AnsatzKind,
    path: &Path,
    protocol: Protocol,
    mode: ShotMode,
) -> Result<(EnergyEstimate, f64, Option<f64>), CliError> {
    let file: ParamsFile = read_json(path)?;
    let n = sesq::encoding::register_width(h.n_sites());
    let penalty = if ansatz == AnsatzKind::HardwareEfficient && (1usize << n) != h.n_sites() {
        let s = match a.penalty_strength {
            Some(s) => s,
            None => h.default_penalty_strength().map_err(|e| CliError::Run(e.to_string()))?,
        };
        Some(sesq::hamiltonian::PenaltyConfig::new(s, n).map_err(usage)?)
    } else {
        None
    };
    let cfg = VqeConfig {
        ansatz,
        protocol: match protocol {
            Protocol::Original => CostProtocol::Original,
            Protocol::Binary => CostProtocol::Binary,
        },
        shots: mode,
        optimizer: OptimizerConfig::default_for(mode),
        max_evaluations: 1,
        seed: a.seed,
        penalty,
        layers: a.layers,
        epsilon: a.epsilon,
        tolerance: 1e-3,
    };
    let problem = Problem::new(h, &cfg).map_err(usage)?;
    let oracle = problem.exact_energy(&file.params).map_err(usage)?;
    let est = problem.measure(&file.params, mode, a.seed).map_err(|e| CliError::Run(e.to_string()))?;
    Ok((est, oracle, penalty.map(|p| p.strength)))
}

/// Arguments recorded in a previous report; `--out` still comes from the
/// current invocation.
fn from_manifest(path: &Path, out: Option<PathBuf>) -> Result<ReconstructArgs, CliError> {
    let report: serde_json::Value = read_json(path)?;
    let r = report
        .pointer("/manifest/resolved_config")
        .ok_or_else(|| CliError::Usage(format!("{}: no manifest.resolved_config", path.display())))?;
    let field = |k: &str| r.get(k).cloned().unwrap_or(serde_json::Value::Null);
    let bad = |k: &str, e: serde_json::Error| CliError::Usage(format!("{}: resolved_config.{k}: {e}", path.display()));
    macro_rules! take {
        ($k:literal) => {
            serde_json::from_value(field($k)).map_err(|e| bad($k, e))?
        };
    }
    let protocol: String = take!("protocol");
    Ok(ReconstructArgs {
        manifest: None,
        hamiltonian: take!("hamiltonian"),
        protocol: Some(protocol.parse().map_err(CliError::Usage)?),
        ansatz: take!("ansatz"),
        params: take!("params"),
        amplitudes: take!("amplitudes"),
        encoding: take!("encoding"),
        layers: take!("layers"),
        penalty_strength: take!("penalty_strength"),
        shots: take!("shots"),
        seed: take!("seed"),
        epsilon: take!("epsilon"),
        out,
    })
}

pub fn run(a: &ReconstructArgs) -> Result<Outcome, CliError> {
    if let Some(m) = &a.manifest {
        return run(&from_manifest(m, a.out.clone())?);
    }
    let start = Instant::now();
    let hamiltonian = a.hamiltonian.clone().ok_or_else(|| CliError::Usage("--hamiltonian is required".into()))?;
    let h = load_hamiltonian(&hamiltonian)?;
    let mode = shot_mode(a.shots)?;
    let protocol = a.protocol.unwrap_or(match a.ansatz {
        None | Some(AnsatzKind::OneHotSes) => Protocol::Original,
        Some(_) => Protocol::Binary,
    });
    if a.ansatz.is_none() && protocol == Protocol::Original && a.encoding != EncodingMode::Shifted {
        return Err(CliError::Usage("--encoding applies to the binary protocol only".into()));
    }
    let (est, oracle, penalty_strength) = match (&a.amplitudes, a.ansatz, &a.params) {
        (Some(p), None, None) => {
            let (e, o) = from_amplitudes(a, &h, p, protocol, mode)?;
            (e, o, None)
        }
        (None, Some(ansatz), Some(p)) => from_ansatz(a, &h, ansatz, p, protocol, mode)?,
        _ => return Err(CliError::Usage("give --amplitudes, or --ansatz with --params".into())),
    };

    let settings: Vec<SettingRow> = est
        .settings
        .iter()
        .map(|s| SettingRow {
            label: s.label.to_string(),
            basis: s.basis.clone(),
            shots: match mode {
                ShotMode::Exact => 0,
                ShotMode::Shots(n) => n,
            },
            unknown_outcomes: s.unknown_outcomes,
            estimates: s.estimates.iter().map(|(&id, e)| (observable_key(id), e.value)).collect(),
        })
        .collect();
    let warnings = est.warnings();
    let out = a.out.clone().unwrap_or_else(|| resolve_out_dir(None).join("reconstruct_report.json"));
    let resolved = json!({
        "hamiltonian": std::path::absolute(&hamiltonian).unwrap_or(hamiltonian.clone()),
        "protocol": protocol.name(),
        "ansatz": a.ansatz,
        "params": a.params.as_ref().map(|p| std::path::absolute(p).unwrap_or(p.clone())),
        "amplitudes": a.amplitudes.as_ref().map(|p| std::path::absolute(p).unwrap_or(p.clone())),
        "encoding": a.encoding,
        "layers": a.layers,
        "penalty_strength": penalty_strength,
        "shots": a.shots,
        "seed": a.seed,
        "epsilon": est.reconstruction.profile.threshold,
    });
    let mut manifest = RunManifest::new("reconstruct", None, resolved, a.seed);
    manifest.output_paths = display(std::slice::from_ref(&out));
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let report = json!({
        "manifest": to_json(&manifest)?,
        "energy": est.energy,
        "oracle_energy": oracle,
        "abs_error": (est.energy - oracle).abs(),
        "total_shots": est.total_shots,
        "settings": to_json(&settings)?,
        "profile": to_json(&est.reconstruction.profile)?,
        "graph": to_json(&est.reconstruction.graph)?,
        "diagnostics": to_json(&est.reconstruction.diagnostics)?,
        "unresolved_terms": est.unresolved_terms,
        "warnings": warnings,
    });
    write_json(&out, &report)?;

    let g = &est.reconstruction.graph;
    println!("energy          {:.12}", est.energy);
    println!("oracle energy   {:.12}", oracle);
    println!("active sites    {}", est.reconstruction.profile.active_sites().len());
    println!("components      {}", g.n_components);
    println!("total shots     {}", est.total_shots);
    println!("report          {}", out.display());
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(if est.unresolved_terms.is_empty() { Outcome::Success } else { Outcome::Flagged })
}
