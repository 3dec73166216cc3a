use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis with a scalar coefficient.
///
/// `ops[q]` acts on qubit `q`; the printed form lists qubit 0 first.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    ops: Vec<Pauli>,
    coefficient: Complex64,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        Self { ops: vec![Pauli::I; num_qubits], coefficient: Complex64::new(1.0, 0.0) }
    }

    pub fn new(ops: Vec<Pauli>, coefficient: Complex64) -> Self {
        Self { ops, coefficient }
    }

    /// Identity everywhere except the listed qubits.
    pub fn from_sparse(num_qubits: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut p = Self::identity(num_qubits);
        for &(q, op) in factors {
            p.ops[q] = op;
        }
        p
    }

    /// Parses a qubit-0-first symbol string such as `"XYZI"`.
    pub fn parse(symbols: &str) -> Option<Self> {
        let ops = symbols
            .chars()
            .map(|c| match c {
                'I' => Some(Pauli::I),
                'X' => Some(Pauli::X),
                'Y' => Some(Pauli::Y),
                'Z' => Some(Pauli::Z),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self::new(ops, Complex64::new(1.0, 0.0)))
    }

    pub fn with_coefficient(mut self, c: Complex64) -> Self {
        self.coefficient = c;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn is_hermitian(&self) -> bool {
        self.coefficient.im.abs() < 1e-15 * self.coefficient.norm().max(1.0)
    }

    /// Bit masks `(flip, phase)`: X and Y flip the bit, Y and Z pick up a
    /// sign on |1>. Only valid for up to 64 qubits.
    pub(crate) fn masks(&self) -> (u64, u64, u32) {
        let mut flip = 0u64;
        let mut phase = 0u64;
        let mut n_y = 0u32;
        for (q, op) in self.ops.iter().enumerate() {
            match op {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    phase |= 1 << q;
                    n_y += 1;
                }
                Pauli::Z => phase |= 1 << q,
            }
        }
        (flip, phase, n_y)
    }

    /// Action on a basis state: `P|b> = factor |b'>` (coefficient excluded).
    pub fn apply_to_basis(&self, basis: u64) -> (u64, Complex64) {
        let (flip, phase, n_y) = self.masks();
        let mut factor = match n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if (basis & phase).count_ones() % 2 == 1 {
            factor = -factor;
        }
        (basis ^ flip, factor)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            write!(f, "{}", op.symbol())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_acts_as_i_x_z() {
        let y = PauliString::parse("Y").unwrap();
        let (b, f) = y.apply_to_basis(0);
        assert_eq!(b, 1);
        assert_eq!(f, Complex64::new(0.0, 1.0));
        let (b, f) = y.apply_to_basis(1);
        assert_eq!(b, 0);
        assert_eq!(f, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn display_lists_qubit_zero_first() {
        let p = PauliString::from_sparse(4, &[(0, Pauli::X), (3, Pauli::Z)]);
        assert_eq!(p.to_string(), "XIIZ");
    }
}
