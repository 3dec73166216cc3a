//! Exact complex-amplitude simulation.
//!
//! Basis index `b` is the little-endian integer of the register bitstring:
//! qubit 0 is the least significant bit. Two storage layouts implement
//! [`QuantumState`]: a dense vector for narrow registers and an ordered
//! sparse map for wide registers whose support stays small (one-hot
//! single-excitation states on up to 64 qubits).

mod dense;
mod pauli;
mod sparse;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateOp};

pub use dense::StateVector;
pub use pauli::{Pauli, PauliString};
pub use sparse::SparseState;

/// Amplitudes with squared modulus below this are dropped from sparse storage.
pub(crate) const SPARSE_PRUNE: f64 = 1e-30;
/// Largest support a rotated sparse distribution may expand to.
pub(crate) const MAX_EXPANDED_SUPPORT: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("width mismatch: state has {state} qubits, operand has {operand}")]
    WidthMismatch { state: usize, operand: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("state is not normalised (norm^2 = {0})")]
    NotNormalised(f64),
    #[error("observable is not Hermitian (imaginary part {0:.3e})")]
    NonHermitian(f64),
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("register of {0} qubits is too wide for this representation")]
    TooWide(usize),
    #[error("expanded support would exceed {MAX_EXPANDED_SUPPORT} entries")]
    SupportTooLarge,
}

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub fn symbol(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
            Basis::Y => 'Y',
        }
    }

    /// Gates mapping the +1 eigenstate of this basis to |0> and the -1
    /// eigenstate to |1>.
    pub fn rotation(self, qubit: usize) -> Vec<GateOp> {
        match self {
            Basis::Z => Vec::new(),
            Basis::X => vec![GateOp::H(qubit)],
            Basis::Y => vec![GateOp::Sdg(qubit), GateOp::H(qubit)],
        }
    }
}

/// Qubit-0-first rendering such as `XYXY`.
pub fn basis_string(bases: &[Basis]) -> String {
    bases.iter().map(|b| b.symbol()).collect()
}

/// Big-endian bitstring of a basis index: the leftmost character is qubit
/// `width - 1`.
pub fn bitstring(index: u64, width: usize) -> String {
    (0..width).rev().map(|q| if index >> q & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str) -> Option<u64> {
    if s.is_empty() || s.len() > 64 {
        return None;
    }
    s.chars().try_fold(0u64, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// Counts of measured outcomes for one setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotHistogram {
    pub setting_label: String,
    pub num_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub total_shots: u64,
}

impl ShotHistogram {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.setting_label = label.into();
        self
    }

    pub fn count(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: u64) -> f64 {
        self.count(outcome) as f64 / self.total_shots as f64
    }

    /// Outcome weights normalised to one, ascending by outcome.
    pub fn weights(&self) -> Vec<(u64, f64)> {
        let total = self.total_shots as f64;
        self.counts.iter().map(|(&k, &c)| (k, c as f64 / total)).collect()
    }

    /// Counts keyed by big-endian bitstring.
    pub fn bitstring_counts(&self) -> BTreeMap<String, u64> {
        self.counts.iter().map(|(&k, &c)| (bitstring(k, self.num_qubits), c)).collect()
    }
}

/// Common interface of the dense and sparse simulators.
pub trait QuantumState: Clone + Send + Sync {
    fn num_qubits(&self) -> usize;

    /// Applies a primitive gate. Composite gates are expanded first.
    fn apply_primitive(&mut self, gate: &GateOp) -> Result<(), SimError>;

    /// Amplitude of one basis state.
    fn amplitude(&self, index: u64) -> Complex64;

    /// Non-zero amplitudes in ascending basis order.
    fn support(&self) -> Vec<(u64, Complex64)>;

    fn norm_sqr(&self) -> f64 {
        self.support().iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    fn apply_gate(&mut self, gate: &GateOp) -> Result<(), SimError> {
        gate.validate(self.num_qubits())?;
        if gate.is_composite() {
            for part in gate.decompose() {
                self.apply_gate(&part)?;
            }
            Ok(())
        } else {
            self.apply_primitive(gate)
        }
    }

    fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.width() != self.num_qubits() {
            return Err(SimError::WidthMismatch { state: self.num_qubits(), operand: circuit.width() });
        }
        for g in circuit.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// `<psi|P|psi>` including the string's coefficient. Fails when the
    /// result has a non-negligible imaginary part.
    fn expectation_pauli(&self, p: &PauliString) -> Result<f64, SimError> {
        let z = self.expectation_pauli_complex(p)?;
        if z.im.abs() >= 1e-12 {
            return Err(SimError::NonHermitian(z.im));
        }
        Ok(z.re)
    }

    fn expectation_pauli_complex(&self, p: &PauliString) -> Result<Complex64, SimError> {
        if p.num_qubits() != self.num_qubits() {
            return Err(SimError::WidthMismatch { state: self.num_qubits(), operand: p.num_qubits() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.support() {
            let (b2, factor) = p.apply_to_basis(b);
            acc += self.amplitude(b2).conj() * factor * amp;
        }
        Ok(acc * p.coefficient())
    }

    /// Outcome probabilities after rotating each qubit into its measurement
    /// basis, ascending by outcome, zero entries omitted.
    fn rotated_distribution(&self, bases: &[Basis]) -> Result<Vec<(u64, f64)>, SimError> {
        if bases.len() != self.num_qubits() {
            return Err(SimError::WidthMismatch { state: self.num_qubits(), operand: bases.len() });
        }
        let rotated = bases.iter().filter(|b| **b != Basis::Z).count();
        let support = self.support();
        if rotated >= 64 || support.len().saturating_mul(1usize << rotated.min(40)) > MAX_EXPANDED_SUPPORT {
            return Err(SimError::SupportTooLarge);
        }
        let mut state = self.clone();
        for (q, b) in bases.iter().enumerate() {
            for g in b.rotation(q) {
                state.apply_primitive(&g)?;
            }
        }
        Ok(state
            .support()
            .into_iter()
            .map(|(k, a)| (k, a.norm_sqr()))
            .filter(|(_, p)| *p > 0.0)
            .collect())
    }

    /// Seeded Born-rule sampling in the given per-qubit bases.
    ///
    /// Counts are drawn as one multinomial over the rotated distribution
    /// (sequential conditional binomials), so the cost does not grow with
    /// the shot count. Identical inputs give identical histograms.
    fn sample_bitstrings(&self, bases: &[Basis], shots: u64, seed: u64) -> Result<ShotHistogram, SimError> {
        if shots == 0 {
            return Err(SimError::ZeroShots);
        }
        let dist = self.rotated_distribution(bases)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let counts = multinomial(&dist, shots, &mut rng);
        Ok(ShotHistogram {
            setting_label: basis_string(bases),
            num_qubits: self.num_qubits(),
            counts,
            total_shots: shots,
        })
    }

    /// `<self|other>`.
    fn overlap(&self, other: &Self) -> Result<Complex64, SimError> {
        if self.num_qubits() != other.num_qubits() {
            return Err(SimError::WidthMismatch { state: self.num_qubits(), operand: other.num_qubits() });
        }
        Ok(self.support().iter().map(|&(b, a)| a.conj() * other.amplitude(b)).sum())
    }
}

fn multinomial(dist: &[(u64, f64)], shots: u64, rng: &mut ChaCha8Rng) -> BTreeMap<u64, u64> {
    let mut counts = BTreeMap::new();
    let mut remaining = shots;
    let mut p_left: f64 = dist.iter().map(|(_, p)| p).sum();
    for (i, &(outcome, p)) in dist.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let c = if i + 1 == dist.len() {
            remaining
        } else {
            let q = if p_left > 0.0 { (p / p_left).clamp(0.0, 1.0) } else { 1.0 };
            Binomial::new(remaining, q).expect("probability clamped to [0, 1]").sample(rng)
        };
        if c > 0 {
            counts.insert(outcome, c);
        }
        remaining -= c;
        p_left -= p;
    }
    counts
}

impl fmt::Display for ShotHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} shots)", self.setting_label, self.total_shots)?;
        for (k, c) in self.bitstring_counts() {
            writeln!(f, "  {k}: {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_are_big_endian() {
        assert_eq!(bitstring(1, 3), "001");
        assert_eq!(bitstring(6, 3), "110");
        assert_eq!(parse_bitstring("110"), Some(6));
        assert_eq!(parse_bitstring("1a"), None);
    }

    #[test]
    fn multinomial_preserves_total() {
        let dist = vec![(0, 0.2), (3, 0.5), (7, 0.3)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = multinomial(&dist, 1000, &mut rng);
        assert_eq!(c.values().sum::<u64>(), 1000);
    }
}
