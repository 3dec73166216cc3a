use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sesq::optim::{SimplexOptions, SpsaOptions};
use sesq::vqe::{optimize, OptimizerConfig, RunStatus, VqeResult};

use crate::config::{HamiltonianSpec, OutputSection, RunConfig, VqeSection};
use crate::report::{display, ensure_parent, to_json, write_json, RunManifest};
use crate::{CliError, Outcome, SolveArgs};

#[derive(Serialize)]
struct HamiltonianInfo {
    n_sites: usize,
    register_width: usize,
}

#[derive(Serialize)]
struct SolveReport<'a> {
    manifest: RunManifest,
    hamiltonian: HamiltonianInfo,
    result: &'a VqeResult,
    warnings: Vec<String>,
}

/// Starting configuration: a TOML file, a previous report's snapshot, or
/// flags alone.
fn base_config(a: &SolveArgs) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    if let Some(p) = &a.config {
        return Ok((RunConfig::load(p)?, Some(p.clone())));
    }
    if let Some(p) = &a.manifest {
        let src = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
        let v: serde_json::Value =
            serde_json::from_str(&src).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        let snap = v
            .pointer("/manifest/resolved_config")
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("{}: no manifest.resolved_config", p.display())))?;
        let cfg: RunConfig =
            serde_json::from_value(snap).map_err(|e| CliError::Usage(format!("{}: invalid resolved_config: {e}", p.display())))?;
        return Ok((cfg, Some(p.clone())));
    }
    let file = a
        .hamiltonian
        .clone()
        .ok_or_else(|| CliError::Usage("solve needs --config, --manifest or --hamiltonian".into()))?;
    let spec = HamiltonianSpec { file: Some(file), family: None, n_sites: None, hopping: 1.0, disorder: 0.0, flux: 0.0, seed: 0 };
    Ok((RunConfig { hamiltonian: spec, vqe: VqeSection::default(), output: OutputSection::default() }, None))
}

fn parse_optimizer(name: &str) -> Result<OptimizerConfig, CliError> {
    match name {
        "sequential" => Ok(OptimizerConfig::Sequential),
        "simplex" => Ok(OptimizerConfig::Simplex(SimplexOptions::default())),
        "spsa" => Ok(OptimizerConfig::Spsa(SpsaOptions::default())),
        other => Err(CliError::Usage(format!("unknown optimizer `{other}` (sequential, simplex, spsa)"))),
    }
}

fn apply_overrides(cfg: &mut RunConfig, a: &SolveArgs) -> Result<(), CliError> {
    if let Some(h) = &a.hamiltonian {
        cfg.hamiltonian = HamiltonianSpec { file: Some(h.clone()), family: None, n_sites: None, ..cfg.hamiltonian.clone() };
    }
    let v = &mut cfg.vqe;
    if let Some(x) = a.ansatz {
        if x != v.ansatz {
            // A protocol resolved for another ansatz would no longer fit.
            v.protocol = None;
            v.penalty_strength = None;
        }
        v.ansatz = x;
    }
    if let Some(x) = a.protocol {
        v.protocol = Some(x);
    }
    if a.exact {
        v.shots = None;
    }
    if let Some(x) = a.shots {
        v.shots = Some(x);
    }
    if a.exact || a.shots.is_some() {
        // Re-derive the default optimizer for the new mode unless one is given.
        v.optimizer = None;
    }
    if let Some(x) = &a.optimizer {
        v.optimizer = Some(parse_optimizer(x)?);
    }
    if let Some(x) = a.max_evaluations {
        v.max_evaluations = x;
    }
    if let Some(x) = a.seed {
        v.seed = x;
    }
    if let Some(x) = a.layers {
        v.layers = x;
    }
    if let Some(x) = a.tolerance {
        v.tolerance = x;
    }
    if let Some(x) = a.epsilon {
        v.epsilon = Some(x);
    }
    if let Some(x) = a.penalty_strength {
        v.penalty_strength = Some(x);
    }
    if a.no_trace_csv {
        cfg.output.trace_csv = false;
    }
    if let Some(d) = &a.out_dir {
        cfg.output.dir = Some(d.clone());
    }
    Ok(())
}

fn write_trace(path: &Path, r: &VqeResult) -> Result<(), CliError> {
    ensure_parent(path)?;
    let err = |e: csv::Error| CliError::Run(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["evaluation", "energy", "best_so_far"]).map_err(err)?;
    let mut best = f64::INFINITY;
    for &(i, e) in &r.trace {
        best = best.min(e);
        w.write_record([i.to_string(), e.to_string(), best.to_string()]).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Run(format!("cannot write {}: {e}", path.display())))
}

pub fn run(a: &SolveArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (mut cfg, config_path) = base_config(a)?;
    apply_overrides(&mut cfg, a)?;
    let h = cfg.resolve()?;
    let vqe = cfg.vqe_config(&h)?;
    let out_dir = cfg.out_dir(None);
    if let Some(d) = &cfg.output.dir {
        cfg.output.dir = Some(std::path::absolute(d).unwrap_or_else(|_| d.clone()));
    }

    let result = optimize(&h, &vqe).map_err(|e| match e {
        sesq::vqe::VqeError::Hamiltonian(_) | sesq::vqe::VqeError::Sim(_) => CliError::Run(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;

    let report_path = out_dir.join("solve_report.json");
    let trace_path = out_dir.join("trace.csv");
    let mut outputs = vec![report_path.clone()];
    if cfg.output.trace_csv {
        write_trace(&trace_path, &result)?;
        outputs.push(trace_path);
    }

    let mut warnings = Vec::new();
    if result.status == RunStatus::NotConverged {
        warnings.push(format!(
            "not-converged: relative error {:.3e} above tolerance {:.1e} after {} evaluations",
            result.relative_error, vqe.tolerance, result.evaluations_used
        ));
    }
    if result.physical_weight < 1.0 - 1e-6 {
        warnings.push(format!("leakage: weight {:.6} on padding codewords", 1.0 - result.physical_weight));
    }

    let mut manifest = RunManifest::new("solve", config_path.as_deref(), to_json(&cfg)?, vqe.seed);
    manifest.output_paths = display(&outputs);
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let report = SolveReport {
        manifest,
        hamiltonian: HamiltonianInfo { n_sites: h.n_sites(), register_width: sesq::encoding::register_width(h.n_sites()) },
        result: &result,
        warnings,
    };
    write_json(&report_path, &report)?;

    println!("status          {:?}", result.status);
    println!("best energy     {:.12}", result.best_energy);
    println!("exact ground    {:.12}", result.exact_ground);
    println!("relative error  {:.3e}", result.relative_error);
    println!("evaluations     {}", result.evaluations_used);
    println!("report          {}", report_path.display());
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(match result.status {
        RunStatus::Converged => Outcome::Success,
        RunStatus::NotConverged => Outcome::Flagged,
    })
}
