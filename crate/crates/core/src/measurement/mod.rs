//! Global measurement settings, correlator estimation and profile
//! reconstruction.
//!
//! Two protocols:
//! * **original** (one-hot register, N qubits): all-Z, all-X, and an
//!   alternating X/Y pattern. Populations come from the all-Z weights, nearest
//!   neighbour cosines from `<X_j X_{j+1}>`, sines from the mixed pairs.
//! * **binary** (data register of `n` qubits): all-Z plus, for each qubit
//!   `l`, one setting with X on `l` and one with Y on `l`, Z elsewhere.
//!   These resolve every pair of codewords differing only at `l`.
//!
//! Every pair estimate is oriented from the lower site `j` to the higher
//! site `k`: `Cos(j, k) ~ 2|a_j||a_k| cos(t_k - t_j)` and
//! `Sin(j, k) ~ 2|a_j||a_k| sin(t_k - t_j)`.

mod energy;
mod reconstruct;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{hypercube_edges, EncodingMap};
use crate::hamiltonian::HamiltonianError;
use crate::sim::{basis_string, Basis, Pauli, PauliString, QuantumState, ShotHistogram, SimError};

pub use energy::{estimate_energy, default_threshold, EnergyEstimate, ShotMode};
pub use reconstruct::{reconstruct_profile, Diagnostics, PhaseEdge, PhaseGraph, Reconstruction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("setting {label} has {setting} bases but the register has {register} qubits")]
    WidthMismatch { label: String, setting: usize, register: usize },
    #[error("the binary protocol needs an encoding map")]
    MapRequired,
    #[error("the original protocol does not take an encoding map")]
    MapNotAllowed,
    #[error("missing measurement setting {0}")]
    MissingSetting(String),
    #[error("{0}")]
    Inconsistent(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Three settings on a one-hot register.
    Original,
    /// `2n + 1` settings on a binary data register.
    Binary,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Self::Original => "original",
            Self::Binary => "binary",
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "original" => Ok(Self::Original),
            "binary" => Ok(Self::Binary),
            other => Err(format!("unknown protocol `{other}` (expected original or binary)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SettingLabel {
    MZ,
    MXX,
    MXY,
    BZ,
    BX(usize),
    BY(usize),
}

impl fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MZ => write!(f, "M_Z"),
            Self::MXX => write!(f, "M_XX"),
            Self::MXY => write!(f, "M_XY"),
            Self::BZ => write!(f, "BZ"),
            Self::BX(l) => write!(f, "BX({l})"),
            Self::BY(l) => write!(f, "BY({l})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub label: SettingLabel,
    pub bases: Vec<Basis>,
}

impl MeasurementSetting {
    /// Qubit 0 first, e.g. `XYXY`.
    pub fn basis_string(&self) -> String {
        basis_string(&self.bases)
    }
}

/// `[M_Z, M_XX, M_XY]` on an `n_sites`-qubit one-hot register.
pub fn settings_original(n_sites: usize) -> Vec<MeasurementSetting> {
    let alt = (0..n_sites).map(|q| if q % 2 == 0 { Basis::X } else { Basis::Y }).collect();
    vec![
        MeasurementSetting { label: SettingLabel::MZ, bases: vec![Basis::Z; n_sites] },
        MeasurementSetting { label: SettingLabel::MXX, bases: vec![Basis::X; n_sites] },
        MeasurementSetting { label: SettingLabel::MXY, bases: alt },
    ]
}

/// `[BZ, BX(0..n), BY(0..n)]` on an `n`-qubit data register.
pub fn settings_binary(n: usize) -> Vec<MeasurementSetting> {
    let single = |l: usize, b: Basis| {
        let mut bases = vec![Basis::Z; n];
        bases[l] = b;
        bases
    };
    let mut out = vec![MeasurementSetting { label: SettingLabel::BZ, bases: vec![Basis::Z; n] }];
    out.extend((0..n).map(|l| MeasurementSetting { label: SettingLabel::BX(l), bases: single(l, Basis::X) }));
    out.extend((0..n).map(|l| MeasurementSetting { label: SettingLabel::BY(l), bases: single(l, Basis::Y) }));
    out
}

/// Settings of `protocol` for a register described by `n_sites` or `map`.
pub fn settings_for(protocol: Protocol, n_sites: usize, map: Option<&EncodingMap>) -> Result<Vec<MeasurementSetting>, MeasurementError> {
    match (protocol, map) {
        (Protocol::Original, None) => Ok(settings_original(n_sites)),
        (Protocol::Original, Some(_)) => Err(MeasurementError::MapNotAllowed),
        (Protocol::Binary, Some(m)) => Ok(settings_binary(m.width())),
        (Protocol::Binary, None) => Err(MeasurementError::MapRequired),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObservableId {
    /// `|a_j|^2`.
    Population(usize),
    /// `2|a_j||a_k| cos(t_k - t_j)`, `j < k`.
    Cos(usize, usize),
    /// `2|a_j||a_k| sin(t_k - t_j)`, `j < k`.
    Sin(usize, usize),
}

impl fmt::Display for ObservableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Population(j) => write!(f, "pop({j})"),
            Self::Cos(j, k) => write!(f, "cos({j},{k})"),
            Self::Sin(j, k) => write!(f, "sin({j},{k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// 0 in exact mode.
    pub shots_used: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingEstimates {
    pub label: SettingLabel,
    pub basis: String,
    pub estimates: BTreeMap<ObservableId, Estimate>,
    /// Histogram outcomes outside the encoded codewords (binary Z setting).
    pub unknown_outcomes: u64,
}

impl SettingEstimates {
    pub fn get(&self, id: ObservableId) -> Option<f64> {
        self.estimates.get(&id).map(|e| e.value)
    }
}

/// What an estimate is computed from.
pub enum Source<'a, S: QuantumState> {
    /// Analytic expectations of the state.
    Exact(&'a S),
    /// Sampled outcomes, taken in the setting's bases.
    Histogram(&'a ShotHistogram),
}

/// Estimates every observable a setting resolves.
///
/// `map` is `None` for the original protocol, where the register is one-hot
/// with one qubit per site.
pub fn estimate_setting<S: QuantumState>(
    source: Source<'_, S>,
    setting: &MeasurementSetting,
    map: Option<&EncodingMap>,
) -> Result<SettingEstimates, MeasurementError> {
    let width = match &source {
        Source::Exact(s) => s.num_qubits(),
        Source::Histogram(h) => h.num_qubits,
    };
    if setting.bases.len() != width {
        return Err(MeasurementError::WidthMismatch {
            label: setting.label.to_string(),
            setting: setting.bases.len(),
            register: width,
        });
    }
    let is_binary = matches!(setting.label, SettingLabel::BZ | SettingLabel::BX(_) | SettingLabel::BY(_));
    if is_binary && map.is_none() {
        return Err(MeasurementError::MapRequired);
    }
    if let Some(m) = map {
        if !is_binary {
            return Err(MeasurementError::MapNotAllowed);
        }
        if m.width() != width {
            return Err(MeasurementError::WidthMismatch {
                label: setting.label.to_string(),
                setting: m.width(),
                register: width,
            });
        }
    }

    let mut out = SettingEstimates {
        label: setting.label,
        basis: setting.basis_string(),
        estimates: BTreeMap::new(),
        unknown_outcomes: 0,
    };
    let (weights, shots) = match source {
        Source::Exact(state) if !is_binary => {
            estimate_one_hot_exact(state, setting, &mut out)?;
            return Ok(out);
        }
        Source::Exact(state) => (state.rotated_distribution(&setting.bases)?, 0),
        Source::Histogram(h) => (h.weights(), h.total_shots),
    };
    match map {
        None => estimate_one_hot_weights(&weights, setting, shots, &mut out),
        Some(m) => {
            let unknown = estimate_binary_weights(&weights, setting, m, shots, &mut out);
            if let Source::Histogram(h) = source {
                out.unknown_outcomes = unknown.iter().map(|&b| h.count(b)).sum();
            }
        }
    }
    Ok(out)
}

fn insert(out: &mut SettingEstimates, id: ObservableId, value: f64, shots: u64) {
    out.estimates.insert(id, Estimate { value, shots_used: shots });
}

/// Sign that turns the measured pair at `(j, j + 1)` of the alternating
/// pattern into `<X_j Y_{j+1}>`: odd `j` sees `Y_j X_{j+1}`, which is its
/// negative.
fn xy_sign(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn estimate_one_hot_exact<S: QuantumState>(
    state: &S,
    setting: &MeasurementSetting,
    out: &mut SettingEstimates,
) -> Result<(), MeasurementError> {
    let n = state.num_qubits();
    match setting.label {
        SettingLabel::MZ => {
            // Summed Z-basis weights rather than (1 - <Z_j>)/2: the latter
            // leaves roundoff of order 1e-17 on empty sites, which the square
            // root in reconstruction lifts above the activity threshold.
            let mut pop = vec![0.0; n];
            for (index, a) in state.support() {
                for (j, p) in pop.iter_mut().enumerate() {
                    if index >> j & 1 == 1 {
                        *p += a.norm_sqr();
                    }
                }
            }
            for (j, p) in pop.into_iter().enumerate() {
                insert(out, ObservableId::Population(j), p, 0);
            }
        }
        SettingLabel::MXX => {
            for j in 0..n.saturating_sub(1) {
                let p = PauliString::from_sparse(n, &[(j, Pauli::X), (j + 1, Pauli::X)]);
                insert(out, ObservableId::Cos(j, j + 1), state.expectation_pauli(&p)?, 0);
            }
        }
        SettingLabel::MXY => {
            for j in 0..n.saturating_sub(1) {
                let p = PauliString::from_sparse(n, &[(j, pauli_of(setting.bases[j])), (j + 1, pauli_of(setting.bases[j + 1]))]);
                insert(out, ObservableId::Sin(j, j + 1), xy_sign(j) * state.expectation_pauli(&p)?, 0);
            }
        }
        _ => unreachable!("binary settings are routed elsewhere"),
    }
    Ok(())
}

fn pauli_of(b: Basis) -> Pauli {
    match b {
        Basis::Z => Pauli::Z,
        Basis::X => Pauli::X,
        Basis::Y => Pauli::Y,
    }
}

fn sign(bits: u64) -> f64 {
    if bits.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn estimate_one_hot_weights(weights: &[(u64, f64)], setting: &MeasurementSetting, shots: u64, out: &mut SettingEstimates) {
    let n = setting.bases.len();
    match setting.label {
        SettingLabel::MZ => {
            for j in 0..n {
                let p: f64 = weights.iter().filter(|(b, _)| b >> j & 1 == 1).map(|(_, w)| w).sum();
                insert(out, ObservableId::Population(j), p, shots);
            }
        }
        SettingLabel::MXX | SettingLabel::MXY => {
            for j in 0..n.saturating_sub(1) {
                let parity: f64 = weights.iter().map(|&(b, w)| w * sign(b >> j & 0b11)).sum();
                let (id, v) = if setting.label == SettingLabel::MXX {
                    (ObservableId::Cos(j, j + 1), parity)
                } else {
                    (ObservableId::Sin(j, j + 1), xy_sign(j) * parity)
                };
                insert(out, id, v, shots);
            }
        }
        _ => unreachable!("binary settings are routed elsewhere"),
    }
}

/// Returns outcomes of a Z setting that match no codeword.
fn estimate_binary_weights(
    weights: &[(u64, f64)],
    setting: &MeasurementSetting,
    map: &EncodingMap,
    shots: u64,
    out: &mut SettingEstimates,
) -> Vec<u64> {
    let mut unknown = Vec::new();
    match setting.label {
        SettingLabel::BZ => {
            let mut pops = vec![0.0; map.n_sites()];
            for &(b, w) in weights {
                match map.site_of(b) {
                    Some(j) => pops[j] += w,
                    None => unknown.push(b),
                }
            }
            for (j, p) in pops.into_iter().enumerate() {
                insert(out, ObservableId::Population(j), p, shots);
            }
        }
        SettingLabel::BX(l) | SettingLabel::BY(l) => {
            let is_y = matches!(setting.label, SettingLabel::BY(_));
            // Shared bits (position l cleared) identify the pair.
            let mut pairs: HashMap<u64, (usize, usize, f64)> = HashMap::new();
            for e in hypercube_edges(map).into_iter().filter(|e| e.position == l) {
                let key = map.codeword(e.j).bits & !(1 << l);
                // The sine is measured from the bit-0 codeword towards the bit-1 one.
                let orient = if is_y && map.codeword(e.j).bit(l) { -1.0 } else { 1.0 };
                pairs.insert(key, (e.j, e.k, orient));
            }
            let mut acc: HashMap<u64, f64> = HashMap::new();
            for &(b, w) in weights {
                let key = b & !(1 << l);
                if pairs.contains_key(&key) {
                    *acc.entry(key).or_default() += w * sign(b >> l & 1);
                }
            }
            for (key, (j, k, orient)) in pairs {
                let v = orient * acc.get(&key).copied().unwrap_or(0.0);
                let id = if is_y { ObservableId::Sin(j, k) } else { ObservableId::Cos(j, k) };
                insert(out, id, v, shots);
            }
        }
        _ => unreachable!("one-hot settings are routed elsewhere"),
    }
    unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::EncodingMode;
    use crate::sim::StateVector;
    use num_complex::Complex64;

    #[test]
    fn setting_families() {
        let s = settings_original(4);
        let strings: Vec<String> = s.iter().map(|x| x.basis_string()).collect();
        assert_eq!(strings, ["ZZZZ", "XXXX", "XYXY"]);
        assert_eq!(settings_original(5)[2].basis_string(), "XYXYX");
        assert_eq!(settings_binary(3).len(), 7);
        assert_eq!(settings_binary(1).len(), 3);
        let b5 = settings_binary(5);
        assert_eq!(b5.len(), 11);
        let bx2 = b5.iter().find(|s| s.label == SettingLabel::BX(2)).unwrap();
        assert_eq!(bx2.basis_string(), "ZZXZZ");
    }

    fn pair_state(map: &EncodingMap, j: usize, k: usize, phase: Complex64) -> StateVector {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << map.width()];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[map.codeword(j).bits as usize] = Complex64::new(s, 0.0);
        v[map.codeword(k).bits as usize] = phase * s;
        StateVector::from_amplitudes(v).unwrap()
    }

    #[test]
    fn binary_pair_estimates() {
        let map = EncodingMap::build(8, EncodingMode::Shifted).unwrap();
        // Sites 0 and 2 have codewords 001 and 011: they differ at qubit 1.
        let settings = settings_binary(3);
        let bx = settings.iter().find(|s| s.label == SettingLabel::BX(1)).unwrap();
        let by = settings.iter().find(|s| s.label == SettingLabel::BY(1)).unwrap();
        for (phase, c, s) in [(Complex64::new(1.0, 0.0), 1.0, 0.0), (Complex64::new(0.0, 1.0), 0.0, 1.0)] {
            let st = pair_state(&map, 0, 2, phase);
            let ex = estimate_setting(Source::Exact(&st), bx, Some(&map)).unwrap();
            let ey = estimate_setting(Source::Exact(&st), by, Some(&map)).unwrap();
            assert!((ex.get(ObservableId::Cos(0, 2)).unwrap() - c).abs() < 1e-12);
            assert!((ey.get(ObservableId::Sin(0, 2)).unwrap() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_orientation_when_lower_site_has_bit_set() {
        // Plain map: site 1 = 01, site 0 = 00 differ at qubit 0, lower site 0
        // has bit 0 clear. Shifted: site 0 = 01, site 3 = 00, lower site has
        // the bit set, so orientation flips.
        let map = EncodingMap::build(4, EncodingMode::Shifted).unwrap();
        let by0 = &settings_binary(2)[3];
        assert_eq!(by0.label, SettingLabel::BY(0));
        let st = pair_state(&map, 0, 3, Complex64::new(0.0, 1.0));
        let e = estimate_setting(Source::Exact(&st), by0, Some(&map)).unwrap();
        assert!((e.get(ObservableId::Sin(0, 3)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let st = StateVector::new(3).unwrap();
        let s = &settings_original(4)[0];
        assert!(matches!(
            estimate_setting(Source::Exact(&st), s, None),
            Err(MeasurementError::WidthMismatch { .. })
        ));
    }
}
