use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use super::{QuantumState, SimError, StateVector, SPARSE_PRUNE};
use crate::circuit::GateOp;

/// Ordered map from basis index to amplitude for registers of up to 64
/// qubits whose support stays small.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    num_qubits: usize,
    amps: BTreeMap<u64, Complex64>,
}

impl SparseState {
    pub fn new(num_qubits: usize) -> Result<Self, SimError> {
        Self::from_entries(num_qubits, [(0, Complex64::new(1.0, 0.0))])
    }

    /// Builds a state from `(index, amplitude)` pairs without renormalising.
    pub fn from_entries<I>(num_qubits: usize, entries: I) -> Result<Self, SimError>
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        if num_qubits == 0 || num_qubits > 64 {
            return Err(SimError::TooWide(num_qubits));
        }
        let mut amps = BTreeMap::new();
        for (k, a) in entries {
            if num_qubits < 64 && k >> num_qubits != 0 {
                return Err(SimError::WidthMismatch { state: num_qubits, operand: 64 - k.leading_zeros() as usize });
            }
            if a.norm_sqr() > SPARSE_PRUNE {
                *amps.entry(k).or_insert_with(Complex64::default) += a;
            }
        }
        Ok(Self { num_qubits, amps })
    }

    /// One-hot embedding: site `j` becomes the basis state with only qubit
    /// `j` set. The amplitudes must be normalised to within 1e-9.
    pub fn one_hot(site_amplitudes: &[Complex64]) -> Result<Self, SimError> {
        let norm: f64 = site_amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalised(norm));
        }
        let scale = 1.0 / norm.sqrt();
        Self::from_entries(
            site_amplitudes.len(),
            site_amplitudes.iter().enumerate().map(|(j, a)| (1u64 << j, a * scale)),
        )
    }

    pub fn to_dense(&self) -> Result<StateVector, SimError> {
        if self.num_qubits > super::dense::MAX_DENSE_QUBITS {
            return Err(SimError::TooWide(self.num_qubits));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << self.num_qubits];
        for (&k, &a) in &self.amps {
            v[k as usize] = a;
        }
        StateVector::from_amplitudes(v)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    fn store(&mut self, k: u64, a: Complex64) {
        if a.norm_sqr() > SPARSE_PRUNE {
            self.amps.insert(k, a);
        } else {
            self.amps.remove(&k);
        }
    }

    fn apply_single(&mut self, q: usize, m: [Complex64; 4]) {
        let bit = 1u64 << q;
        let bases: BTreeSet<u64> = self.amps.keys().map(|k| k & !bit).collect();
        for base in bases {
            let a0 = self.amplitude(base);
            let a1 = self.amplitude(base | bit);
            self.store(base, m[0] * a0 + m[1] * a1);
            self.store(base | bit, m[2] * a0 + m[3] * a1);
        }
    }

    fn apply_controlled_flip(&mut self, controls: &[usize], target: usize) {
        let cmask: u64 = controls.iter().map(|&c| 1u64 << c).sum();
        let tbit = 1u64 << target;
        let old = std::mem::take(&mut self.amps);
        self.amps = old
            .into_iter()
            .map(|(k, a)| if k & cmask == cmask { (k ^ tbit, a) } else { (k, a) })
            .collect();
    }

    fn apply_matrix(&mut self, qubits: &[usize], m: &[Complex64]) {
        let k = qubits.len();
        let dim = 1usize << k;
        let qmask: u64 = qubits.iter().map(|&q| 1u64 << q).sum();
        let offsets: Vec<u64> = (0..dim)
            .map(|l| (0..k).filter(|&i| l >> i & 1 == 1).map(|i| 1u64 << qubits[i]).sum())
            .collect();
        let bases: BTreeSet<u64> = self.amps.keys().map(|key| key & !qmask).collect();
        for base in bases {
            let buf: Vec<Complex64> = offsets.iter().map(|off| self.amplitude(base | off)).collect();
            for (r, off) in offsets.iter().enumerate() {
                let acc: Complex64 = (0..dim).map(|c| m[r * dim + c] * buf[c]).sum();
                self.store(base | off, acc);
            }
        }
    }
}

impl QuantumState for SparseState {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn apply_primitive(&mut self, gate: &GateOp) -> Result<(), SimError> {
        gate.validate(self.num_qubits)?;
        if let Some((q, m)) = gate.single_qubit_matrix() {
            self.apply_single(q, m);
        } else if let Some((controls, target)) = gate.controlled_flip() {
            self.apply_controlled_flip(&controls, target);
        } else if let GateOp::Unitary(u) = gate {
            self.apply_matrix(u.qubits(), u.matrix());
        } else {
            for part in gate.decompose() {
                self.apply_primitive(&part)?;
            }
        }
        Ok(())
    }

    fn amplitude(&self, index: u64) -> Complex64 {
        self.amps.get(&index).copied().unwrap_or_default()
    }

    fn support(&self) -> Vec<(u64, Complex64)> {
        self.amps.iter().map(|(&k, &a)| (k, a)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_register_gate_application() {
        let mut s = SparseState::new(64).unwrap();
        s.apply_gate(&GateOp::X(63)).unwrap();
        s.apply_gate(&GateOp::Cx { control: 63, target: 0 }).unwrap();
        assert_eq!(s.amplitude((1u64 << 63) | 1), Complex64::new(1.0, 0.0));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn hadamard_creates_and_cancels_support() {
        let mut s = SparseState::new(3).unwrap();
        s.apply_gate(&GateOp::H(1)).unwrap();
        assert_eq!(s.len(), 2);
        s.apply_gate(&GateOp::H(1)).unwrap();
        assert_eq!(s.len(), 1);
    }
}
