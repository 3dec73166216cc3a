use std::time::Instant;

use serde_json::json;
use sesq::resources::{asymptotic_table, concrete_rows, format_table, VolumetricReport};

use crate::config::RunConfig;
use crate::report::{display, to_json, RunManifest};
use crate::{CliError, Format, Outcome, ResourcesArgs};

pub fn run(a: &ResourcesArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let n_sites = match (a.n_sites, &a.config) {
        (Some(n), _) => n,
        (None, Some(p)) => {
            let mut cfg = RunConfig::load(p)?;
            cfg.resolve()?.n_sites() as u64
        }
        (None, None) => return Err(CliError::Usage("resources needs --n-sites or --config".into())),
    };
    if n_sites < 2 {
        return Err(CliError::Usage("resources needs at least 2 sites".into()));
    }
    let table = asymptotic_table(n_sites);
    let measured: Vec<VolumetricReport> = if n_sites <= a.measured_limit {
        concrete_rows(n_sites as usize).map_err(|e| CliError::Run(e.to_string()))?
    } else {
        Vec::new()
    };

    let text = match a.format {
        Format::Text => {
            let mut s = format_table(&table);
            if !measured.is_empty() {
                s.push_str(&format!("\n{:<20} {:>14} {:>14} {:>10} {:>22}\n", "measured circuit", "width", "depth", "settings", "volume"));
                for r in &measured {
                    s.push_str(&format!("{:<20} {:>14} {:>14} {:>10} {:>22}\n", r.approach, r.width, r.depth, r.settings, r.volume));
                }
            }
            s
        }
        Format::Json => {
            let resolved = json!({ "n_sites": n_sites, "measured_limit": a.measured_limit });
            let mut manifest = RunManifest::new("resources", a.config.as_deref(), resolved, 0);
            manifest.output_paths = display(a.out.as_slice());
            manifest.wall_time_s = start.elapsed().as_secs_f64();
            let v = json!({ "manifest": to_json(&manifest)?, "table": to_json(&table)?, "measured": to_json(&measured)? });
            serde_json::to_string_pretty(&v).map_err(|e| CliError::Run(e.to_string()))? + "\n"
        }
    };
    match &a.out {
        Some(p) => {
            crate::report::ensure_parent(p)?;
            std::fs::write(p, &text).map_err(|e| CliError::Run(format!("cannot write {}: {e}", p.display())))?;
            println!("{}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(Outcome::Success)
}
