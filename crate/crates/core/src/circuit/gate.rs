use num_complex::Complex64;

use super::CircuitError;

const UNITARITY_TOL: f64 = 1e-10;

/// A dense unitary on an explicit list of qubits.
///
/// The matrix is row-major over the local basis in which bit `i` of the
/// local index is the state of `qubits[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomGate {
    qubits: Vec<usize>,
    matrix: Vec<Complex64>,
}

impl CustomGate {
    pub fn new(qubits: Vec<usize>, matrix: Vec<Complex64>) -> Result<Self, CircuitError> {
        if qubits.is_empty() {
            return Err(CircuitError::InvalidGate("custom gate needs at least one qubit".into()));
        }
        let dim = 1usize << qubits.len();
        if matrix.len() != dim * dim {
            return Err(CircuitError::InvalidGate(format!(
                "custom gate on {} qubits needs {} entries, got {}",
                qubits.len(),
                dim * dim,
                matrix.len()
            )));
        }
        check_distinct(&qubits)?;
        // U^dagger U = I
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += matrix[k * dim + r].conj() * matrix[k * dim + c];
                }
                let expected = if r == c { 1.0 } else { 0.0 };
                if (acc - expected).norm() > UNITARITY_TOL {
                    return Err(CircuitError::NonUnitary { deviation: (acc - expected).norm() });
                }
            }
        }
        Ok(Self { qubits, matrix })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits.len()
    }
}

/// One operation in a circuit.
///
/// `A`, `Swap` and `ControlledPrep` are composite and expand through
/// [`GateOp::decompose`]. Everything else is a primitive for both
/// simulation and cost accounting.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    X(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Cx { control: usize, target: usize },
    Swap(usize, usize),
    Ccx { controls: [usize; 2], target: usize },
    /// Multi-controlled X. For three or more controls the decomposition
    /// borrows one clean helper qubit, which must be listed.
    Mcx { controls: Vec<usize>, target: usize, helper: Option<usize> },
    /// Excitation-preserving two-qubit mixer on (`first`, `second`).
    A { first: usize, second: usize, beta: f64, gamma: f64 },
    /// X on every target, conditioned on `control`.
    ControlledPrep { control: usize, targets: Vec<usize> },
    Unitary(CustomGate),
}

fn check_distinct(qubits: &[usize]) -> Result<(), CircuitError> {
    for (i, a) in qubits.iter().enumerate() {
        if qubits[i + 1..].contains(a) {
            return Err(CircuitError::InvalidGate(format!("qubit {a} used twice in one gate")));
        }
    }
    Ok(())
}

impl GateOp {
    /// Every qubit the gate touches, helpers included.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::X(q) | GateOp::H(q) | GateOp::S(q) | GateOp::Sdg(q) => vec![*q],
            GateOp::Ry { qubit, .. } | GateOp::Rz { qubit, .. } => vec![*qubit],
            GateOp::Cx { control, target } => vec![*control, *target],
            GateOp::Swap(a, b) => vec![*a, *b],
            GateOp::Ccx { controls, target } => vec![controls[0], controls[1], *target],
            GateOp::Mcx { controls, target, helper } => {
                let mut q = controls.clone();
                q.push(*target);
                q.extend(helper.iter().copied());
                q
            }
            GateOp::A { first, second, .. } => vec![*first, *second],
            GateOp::ControlledPrep { control, targets } => {
                let mut q = vec![*control];
                q.extend(targets.iter().copied());
                q
            }
            GateOp::Unitary(g) => g.qubits.clone(),
        }
    }

    /// Structural checks: indices inside the register, no repeated qubits,
    /// and a helper wherever the multi-controlled decomposition needs one.
    pub fn validate(&self, width: usize) -> Result<(), CircuitError> {
        let qubits = self.qubits();
        if let Some(&q) = qubits.iter().find(|&&q| q >= width) {
            return Err(CircuitError::QubitOutOfRange { qubit: q, width });
        }
        check_distinct(&qubits)?;
        if let GateOp::Mcx { controls, helper, .. } = self {
            if controls.len() >= 3 && helper.is_none() {
                return Err(CircuitError::InvalidGate(format!(
                    "MCX with {} controls needs a clean helper qubit",
                    controls.len()
                )));
            }
        }
        Ok(())
    }

    pub fn is_composite(&self) -> bool {
        matches!(self, GateOp::A { .. } | GateOp::Swap(..) | GateOp::ControlledPrep { .. })
    }

    /// Expands composite gates one level into primitives. Small
    /// multi-controlled gates are normalised to X, CX or CCX.
    pub fn decompose(&self) -> Vec<GateOp> {
        match self {
            GateOp::A { first, second, beta, gamma } => {
                let (q0, q1) = (*first, *second);
                let phi_z = gamma + std::f64::consts::PI;
                let phi_y = beta + std::f64::consts::FRAC_PI_2;
                vec![
                    GateOp::Cx { control: q0, target: q1 },
                    GateOp::Rz { qubit: q0, angle: -phi_z },
                    GateOp::Ry { qubit: q0, angle: -phi_y },
                    GateOp::Cx { control: q1, target: q0 },
                    GateOp::Ry { qubit: q0, angle: phi_y },
                    GateOp::Rz { qubit: q0, angle: phi_z },
                    GateOp::Cx { control: q0, target: q1 },
                ]
            }
            GateOp::Swap(a, b) => vec![
                GateOp::Cx { control: *a, target: *b },
                GateOp::Cx { control: *b, target: *a },
                GateOp::Cx { control: *a, target: *b },
            ],
            GateOp::ControlledPrep { control, targets } => targets
                .iter()
                .map(|&t| GateOp::Cx { control: *control, target: t })
                .collect(),
            GateOp::Mcx { controls, target, .. } if controls.len() <= 2 => match controls.len() {
                0 => vec![GateOp::X(*target)],
                1 => vec![GateOp::Cx { control: controls[0], target: *target }],
                _ => vec![GateOp::Ccx { controls: [controls[0], controls[1]], target: *target }],
            },
            other => vec![other.clone()],
        }
    }

    /// CNOT cost of a primitive. `None` for composites and for custom
    /// multi-qubit unitaries, which have no fixed cost.
    pub fn cnot_cost(&self) -> Option<usize> {
        match self {
            GateOp::X(_)
            | GateOp::H(_)
            | GateOp::S(_)
            | GateOp::Sdg(_)
            | GateOp::Ry { .. }
            | GateOp::Rz { .. } => Some(0),
            GateOp::Cx { .. } => Some(1),
            GateOp::Ccx { .. } => Some(6),
            GateOp::Mcx { controls, .. } => Some(mcx_cnot_cost(controls.len())),
            GateOp::Unitary(g) if g.qubits.len() == 1 => Some(0),
            _ => None,
        }
    }

    /// Number of sequential layers the primitive occupies. A multi-controlled
    /// X with k >= 3 controls is a ladder of 2k-3 Toffoli blocks.
    pub fn layer_span(&self) -> usize {
        match self {
            GateOp::Mcx { controls, .. } if controls.len() >= 3 => 2 * controls.len() - 3,
            _ => 1,
        }
    }

    /// Single-qubit matrix `[m00, m01, m10, m11]` for one-qubit primitives.
    pub fn single_qubit_matrix(&self) -> Option<(usize, [Complex64; 4])> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            GateOp::X(q) => Some((q, [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])),
            GateOp::H(q) => Some((q, [c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)])),
            GateOp::S(q) => Some((q, [c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)])),
            GateOp::Sdg(q) => Some((q, [c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)])),
            GateOp::Ry { qubit, angle } => {
                let (sn, cs) = (angle / 2.0).sin_cos();
                Some((qubit, [c(cs, 0.), c(-sn, 0.), c(sn, 0.), c(cs, 0.)]))
            }
            GateOp::Rz { qubit, angle } => {
                let half = angle / 2.0;
                Some((
                    qubit,
                    [Complex64::from_polar(1.0, -half), c(0., 0.), c(0., 0.), Complex64::from_polar(1.0, half)],
                ))
            }
            _ => None,
        }
    }

    /// Control qubits and target for the controlled-X family.
    pub fn controlled_flip(&self) -> Option<(Vec<usize>, usize)> {
        match self {
            GateOp::Cx { control, target } => Some((vec![*control], *target)),
            GateOp::Ccx { controls, target } => Some((controls.to_vec(), *target)),
            GateOp::Mcx { controls, target, .. } => Some((controls.clone(), *target)),
            _ => None,
        }
    }
}

/// CNOT cost of an X with `k` controls: 0 extra for a bare X, 1 for a CNOT,
/// 6 for a Toffoli, and (2k-3) Toffoli blocks of 6 CNOTs with one helper.
pub fn mcx_cnot_cost(k: usize) -> usize {
    match k {
        0 => 0,
        1 => 1,
        2 => 6,
        _ => (2 * k - 3) * 6,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mcx_costs_follow_toffoli_ladder() {
        assert_eq!(mcx_cnot_cost(1), 1);
        assert_eq!(mcx_cnot_cost(2), 6);
        assert_eq!(mcx_cnot_cost(3), 18);
        assert_eq!(mcx_cnot_cost(5), 42);
    }

    #[test]
    fn custom_gate_rejects_non_unitary() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let err = CustomGate::new(vec![0], vec![one, one, zero, one]).unwrap_err();
        assert!(matches!(err, CircuitError::NonUnitary { .. }));
        assert!(CustomGate::new(vec![0], vec![zero, one, one, zero]).is_ok());
    }

    #[test]
    fn validate_catches_range_and_duplicates() {
        assert!(matches!(
            GateOp::Cx { control: 0, target: 3 }.validate(3),
            Err(CircuitError::QubitOutOfRange { qubit: 3, width: 3 })
        ));
        assert!(GateOp::Cx { control: 1, target: 1 }.validate(3).is_err());
        let mcx = GateOp::Mcx { controls: vec![0, 1, 2], target: 3, helper: None };
        assert!(mcx.validate(5).is_err());
    }

    #[test]
    fn a_gate_expands_to_three_cnots() {
        let a = GateOp::A { first: 0, second: 1, beta: 0.3, gamma: -1.1 };
        let parts = a.decompose();
        assert_eq!(parts.len(), 7);
        let cnots: usize = parts.iter().map(|g| g.cnot_cost().unwrap()).sum();
        assert_eq!(cnots, 3);
    }
}
