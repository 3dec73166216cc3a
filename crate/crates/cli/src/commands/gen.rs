use serde_json::json;
use sesq::hamiltonian::HamiltonianFile;

use crate::config::{generate, resolve_out_dir};
use crate::report::{write_json, ARTIFACT_VERSION};
use crate::{CliError, GenArgs, Outcome};

pub fn run(a: &GenArgs) -> Result<Outcome, CliError> {
    let h = generate(a.family, a.n_sites, a.hopping, a.disorder, a.flux, a.seed)?;
    let source = json!({
        "family": a.family.name(),
        "n_sites": a.n_sites,
        "hopping": a.hopping,
        "disorder": a.disorder,
        "flux": a.flux,
        "seed": a.seed,
        "artifact_version": ARTIFACT_VERSION,
    });
    let path = match &a.out {
        Some(p) => p.clone(),
        None => resolve_out_dir(None).join(format!("{}_n{}_seed{}.json", a.family.name(), a.n_sites, a.seed)),
    };
    write_json(&path, &HamiltonianFile::from_hamiltonian(&h, Some(source)))?;
    println!("{}", path.display());
    Ok(Outcome::Success)
}
