use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate_setting, reconstruct_profile, settings_for, MeasurementError, Protocol, Reconstruction, SettingEstimates, Source};
use crate::encoding::EncodingMap;
use crate::hamiltonian::SiteHamiltonian;
use crate::seed::derive_seed;
use crate::sim::QuantumState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotMode {
    Exact,
    /// Shots per setting.
    Shots(u64),
}

/// Activity threshold on magnitudes: `1e-9` exact, `max(1e-6, 3/sqrt(shots))`
/// sampled.
pub fn default_threshold(mode: ShotMode) -> f64 {
    match mode {
        ShotMode::Exact => 1e-9,
        ShotMode::Shots(s) => (3.0 / (s.max(1) as f64).sqrt()).max(1e-6),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub reconstruction: Reconstruction,
    pub settings: Vec<SettingEstimates>,
    /// Nonzero couplings between active sites in different components.
    pub unresolved_terms: Vec<(usize, usize)>,
    pub total_shots: u64,
}

impl EnergyEstimate {
    pub fn warnings(&self) -> Vec<String> {
        let mut w = self.reconstruction.diagnostics.warnings.clone();
        if !self.unresolved_terms.is_empty() {
            w.push(format!("unresolved-phase: couplings {:?} span disconnected components", self.unresolved_terms));
        }
        w
    }
}

/// Runs every setting of `protocol` on `state`, rebuilds the profile and
/// evaluates the energy functional of `h` on it.
///
/// For the binary protocol `state` is the data register and `map` its
/// encoding; for the original protocol `state` is the one-hot register and
/// `map` is `None`. Setting `i` samples with `derive_seed(seed, i)`.
pub fn estimate_energy<S: QuantumState>(
    h: &SiteHamiltonian,
    state: &S,
    protocol: Protocol,
    map: Option<&EncodingMap>,
    mode: ShotMode,
    seed: u64,
    epsilon: Option<f64>,
) -> Result<EnergyEstimate, MeasurementError> {
    let n_sites = h.n_sites();
    let register_sites = match map {
        Some(m) => m.n_sites(),
        None => state.num_qubits(),
    };
    if register_sites != n_sites {
        return Err(MeasurementError::Inconsistent(format!(
            "hamiltonian has {n_sites} sites but the register encodes {register_sites}"
        )));
    }
    let settings = settings_for(protocol, n_sites, map)?;
    let estimates: Vec<SettingEstimates> = settings
        .par_iter()
        .enumerate()
        .map(|(i, setting)| match mode {
            ShotMode::Exact => estimate_setting(Source::Exact(state), setting, map),
            ShotMode::Shots(shots) => {
                let hist = state.sample_bitstrings(&setting.bases, shots, derive_seed(seed, i as u64))?;
                estimate_setting::<S>(Source::Histogram(&hist), setting, map)
            }
        })
        .collect::<Result<_, _>>()?;

    let eps = epsilon.unwrap_or_else(|| default_threshold(mode));
    let reconstruction = reconstruct_profile(&estimates, protocol, map, n_sites, eps)?;
    let energy = h.energy_from_profile(&reconstruction.profile)?;

    let comp = &reconstruction.graph.component;
    let mut unresolved_terms = Vec::new();
    for j in 0..n_sites {
        for k in j + 1..n_sites {
            if let (Some(a), Some(b)) = (comp[j], comp[k]) {
                let z = h.entry(j, k);
                if a != b && (z.re != 0.0 || z.im != 0.0) {
                    unresolved_terms.push((j, k));
                }
            }
        }
    }
    let total_shots = match mode {
        ShotMode::Exact => 0,
        ShotMode::Shots(s) => s * settings.len() as u64,
    };
    Ok(EnergyEstimate { energy, reconstruction, settings: estimates, unresolved_terms, total_shots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::EncodingMode;
    use crate::hamiltonian::random_hermitian;
    use crate::sim::{SparseState, StateVector};
    use num_complex::Complex64;

    #[test]
    fn single_site_energy_is_the_diagonal() {
        let h = SiteHamiltonian::from_real(1, &[2.5]).unwrap();
        let one_hot = SparseState::one_hot(&[Complex64::new(1.0, 0.0)]).unwrap();
        let e = estimate_energy(&h, &one_hot, Protocol::Original, None, ShotMode::Exact, 0, None).unwrap();
        assert!((e.energy - 2.5).abs() < 1e-12);
        let map = EncodingMap::build(1, EncodingMode::Shifted).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 2];
        v[map.codeword(0).bits as usize] = Complex64::new(1.0, 0.0);
        let data = StateVector::from_amplitudes(v).unwrap();
        let e = estimate_energy(&h, &data, Protocol::Binary, Some(&map), ShotMode::Exact, 0, None).unwrap();
        assert!((e.energy - 2.5).abs() < 1e-12);
    }

    #[test]
    fn disconnected_arms_warn() {
        // Site 1 empty splits a 3-site chain into two arms.
        let h = random_hermitian(3, 4).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let st = SparseState::one_hot(&[Complex64::new(s, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, s)]).unwrap();
        let e = estimate_energy(&h, &st, Protocol::Original, None, ShotMode::Exact, 0, None).unwrap();
        assert_eq!(e.reconstruction.graph.n_components, 2);
        assert_eq!(e.unresolved_terms, vec![(0, 2)]);
        assert!(e.warnings().iter().any(|w| w.starts_with("unresolved-phase")));
    }

    #[test]
    fn thresholds() {
        assert_eq!(default_threshold(ShotMode::Exact), 1e-9);
        assert!((default_threshold(ShotMode::Shots(10_000)) - 0.03).abs() < 1e-15);
    }
}
