use num_complex::Complex64;

use super::{QuantumState, SimError, SparseState};
use crate::circuit::GateOp;

pub const MAX_DENSE_QUBITS: usize = 26;

/// Full 2^q amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self, SimError> {
        Self::basis_state(num_qubits, 0)
    }

    pub fn basis_state(num_qubits: usize, index: u64) -> Result<Self, SimError> {
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(SimError::TooWide(num_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        let slot = amps.get_mut(index as usize).ok_or(SimError::WidthMismatch {
            state: num_qubits,
            operand: 64 - index.leading_zeros() as usize,
        })?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps an amplitude vector. The norm must be one to within 1e-9; the
    /// vector is then renormalised exactly.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(SimError::TooWide(num_qubits));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalised(norm));
        }
        let scale = 1.0 / norm.sqrt();
        Ok(Self { num_qubits, amps: amps.into_iter().map(|a| a * scale).collect() })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_sparse(&self) -> SparseState {
        SparseState::from_entries(
            self.num_qubits,
            self.amps
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 0.0)
                .map(|(i, a)| (i as u64, *a)),
        )
        .expect("dense width is within sparse limits")
    }

    /// Consumes the state and returns it after one gate.
    pub fn applied(mut self, gate: &GateOp) -> Result<Self, SimError> {
        self.apply_gate(gate)?;
        Ok(self)
    }

    /// The data register when all qubits at or above `data_width` are |0>.
    /// Returns the normalised data state and the probability that was
    /// found outside the ancilla-clean sector.
    pub fn data_register(&self, data_width: usize) -> Result<(StateVector, f64), SimError> {
        if data_width == 0 || data_width > self.num_qubits {
            return Err(SimError::WidthMismatch { state: self.num_qubits, operand: data_width });
        }
        let dim = 1usize << data_width;
        let kept: Vec<Complex64> = self.amps[..dim].to_vec();
        let kept_norm: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
        let leak = (1.0 - kept_norm).max(0.0);
        if kept_norm <= 0.0 {
            return Err(SimError::NotNormalised(kept_norm));
        }
        let scale = 1.0 / kept_norm.sqrt();
        Ok((
            StateVector { num_qubits: data_width, amps: kept.into_iter().map(|a| a * scale).collect() },
            leak,
        ))
    }

    fn apply_single(&mut self, q: usize, m: [Complex64; 4]) {
        let stride = 1usize << q;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i0 in base..base + stride {
                let i1 = i0 + stride;
                let (a0, a1) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = m[0] * a0 + m[1] * a1;
                self.amps[i1] = m[2] * a0 + m[3] * a1;
            }
            base += 2 * stride;
        }
    }

    fn apply_controlled_flip(&mut self, controls: &[usize], target: usize) {
        let cmask: usize = controls.iter().map(|&c| 1usize << c).sum();
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & tbit == 0 && i & cmask == cmask {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    fn apply_matrix(&mut self, qubits: &[usize], m: &[Complex64]) {
        let k = qubits.len();
        let dim = 1usize << k;
        let qmask: usize = qubits.iter().map(|&q| 1usize << q).sum();
        let offsets: Vec<usize> = (0..dim)
            .map(|l| (0..k).filter(|&i| l >> i & 1 == 1).map(|i| 1usize << qubits[i]).sum())
            .collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & qmask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                buf[l] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..dim {
                    acc += m[r * dim + c] * buf[c];
                }
                self.amps[base | off] = acc;
            }
        }
    }
}

impl QuantumState for StateVector {
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
        self.amps.get(index as usize).copied().unwrap_or_default()
    }

    fn support(&self) -> Vec<(u64, Complex64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (i as u64, *a))
            .collect()
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn expectation_pauli_complex(&self, p: &crate::sim::PauliString) -> Result<Complex64, SimError> {
        if p.num_qubits() != self.num_qubits {
            return Err(SimError::WidthMismatch { state: self.num_qubits, operand: p.num_qubits() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (b2, factor) = p.apply_to_basis(b as u64);
            acc += self.amps[b2 as usize].conj() * factor * amp;
        }
        Ok(acc * p.coefficient())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_on_qubit_zero_sets_lowest_bit() {
        let s = StateVector::new(2).unwrap().applied(&GateOp::X(0)).unwrap();
        assert_eq!(s.amplitude(1), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let s = StateVector::basis_state(2, 0b01).unwrap();
        let s = s.applied(&GateOp::Cx { control: 0, target: 1 }).unwrap();
        assert_eq!(s.amplitude(0b11), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_unnormalised_input() {
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(StateVector::from_amplitudes(v), Err(SimError::NotNormalised(_))));
        assert!(matches!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]), Err(SimError::BadLength(3))));
    }

    #[test]
    fn out_of_range_gate_is_an_error() {
        let mut s = StateVector::new(2).unwrap();
        assert!(s.apply_gate(&GateOp::X(2)).is_err());
    }
}
