//! Parameterised circuit families.
//!
//! * One-hot chain: X on qubit 0, then an excitation-preserving A gate on
//!   every neighbouring pair. Site `j` lives on qubit `j`.
//! * Binary-encoded chain: the same amplitudes written onto a
//!   `ceil(log2 N)`-qubit data register through two ancillas. Each module
//!   runs A on the ancilla pair, swaps them, copies the site codeword into
//!   the data register under the flag, and clears the flag with a
//!   multi-controlled X keyed on that codeword.
//! * Hardware-efficient: layers of Ry, Rz and a CNOT ring.
//!
//! Register layout of the binary circuit: data qubits `0..n`, then the
//! carrier ancilla `a0 = n`, the flag ancilla `a1 = n + 1`, and one clean
//! helper `n + 2` when the unflag gate has three or more controls.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitError, GateCounts, GateOp};
use crate::encoding::{EncodingMap, EncodingMode};
use crate::sim::{QuantumState, SimError, SparseState, StateVector};

/// `(beta_j, gamma_j)` per A gate, in chain order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector {
    pairs: Vec<(f64, f64)>,
}

impl ParameterVector {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, CircuitError> {
        if pairs.iter().any(|(b, g)| !b.is_finite() || !g.is_finite()) {
            return Err(CircuitError::InvalidGate("non-finite ansatz angle".into()));
        }
        Ok(Self { pairs })
    }

    /// `[beta_0, gamma_0, beta_1, gamma_1, ...]`.
    pub fn from_flat(flat: &[f64]) -> Result<Self, CircuitError> {
        if flat.len() % 2 != 0 {
            return Err(CircuitError::ParamLength { expected: flat.len() + 1, got: flat.len() });
        }
        Self::new(flat.chunks(2).map(|c| (c[0], c[1])).collect())
    }

    /// Angles uniform in (-pi, pi].
    pub fn random(n_pairs: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || PI - rng.gen::<f64>() * 2.0 * PI;
        Self { pairs: (0..n_pairs).map(|_| (draw(), draw())).collect() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.pairs.iter().flat_map(|&(b, g)| [b, g]).collect()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Dense 4x4 matrix of `A(beta, gamma)` on (first, second), obtained by
/// running the gate's decomposition on each basis state. Local index is
/// `first + 2 * second`.
pub fn a_gate_matrix(beta: f64, gamma: f64) -> [[Complex64; 4]; 4] {
    let gate = GateOp::A { first: 0, second: 1, beta, gamma };
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for col in 0..4u64 {
        let mut s = StateVector::basis_state(2, col).expect("two qubits");
        for part in gate.decompose() {
            s.apply_gate(&part).expect("valid two-qubit gate");
        }
        for (row, line) in m.iter_mut().enumerate() {
            line[col as usize] = s.amplitude(row as u64);
        }
    }
    m
}

fn check_len(params: &ParameterVector, n_sites: usize) -> Result<(), CircuitError> {
    let expected = n_sites.saturating_sub(1);
    if n_sites == 0 || params.len() != expected {
        return Err(CircuitError::ParamLength { expected, got: params.len() });
    }
    Ok(())
}

/// One-hot chain ansatz on `n_sites` qubits.
pub fn build_ses_circuit(params: &ParameterVector, n_sites: usize) -> Result<Circuit, CircuitError> {
    check_len(params, n_sites)?;
    let mut c = Circuit::new(n_sites, "one_hot_ses");
    c.push(GateOp::X(0))?;
    for (j, &(beta, gamma)) in params.pairs().iter().enumerate() {
        c.push(GateOp::A { first: j, second: j + 1, beta, gamma })?;
    }
    Ok(c)
}

/// How the flag writes the site codeword onto the data register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PrepMode {
    /// Flip only the bits that differ from the previous module's codeword.
    /// The carrier branch is kept on the previous codeword by a matching
    /// update after each unflag.
    #[default]
    Incremental,
    /// Write the full codeword from |0...0> in every module.
    FromZero,
}

/// Qubit roles of a binary-encoded circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinaryLayout {
    pub data_width: usize,
    pub carrier: usize,
    pub flag: usize,
    pub helper: Option<usize>,
    pub width: usize,
}

impl BinaryLayout {
    pub fn for_map(map: &EncodingMap) -> Self {
        let n = map.width();
        let helper = (n >= 3).then_some(n + 2);
        Self { data_width: n, carrier: n, flag: n + 1, helper, width: n + 2 + usize::from(helper.is_some()) }
    }
}

fn flips(from: u64, to: u64, width: usize) -> Vec<usize> {
    (0..width).filter(|&l| (from ^ to) >> l & 1 == 1).collect()
}

/// X on `target` iff the data register holds `pattern`.
fn unflag(c: &mut Circuit, layout: &BinaryLayout, pattern: u64, target: usize) -> Result<(), CircuitError> {
    let zeros: Vec<usize> = (0..layout.data_width).filter(|&l| pattern >> l & 1 == 0).collect();
    for &l in &zeros {
        c.push(GateOp::X(l))?;
    }
    let controls: Vec<usize> = (0..layout.data_width).collect();
    let helper = if controls.len() >= 3 { layout.helper } else { None };
    c.push(GateOp::Mcx { controls, target, helper })?;
    for &l in &zeros {
        c.push(GateOp::X(l))?;
    }
    Ok(())
}

fn prep(c: &mut Circuit, control: usize, targets: Vec<usize>) -> Result<(), CircuitError> {
    if !targets.is_empty() {
        c.push(GateOp::ControlledPrep { control, targets })?;
    }
    Ok(())
}

/// Binary-encoded chain ansatz with incremental codeword preparation.
pub fn build_binary_ses_circuit(params: &ParameterVector, map: &EncodingMap) -> Result<Circuit, CircuitError> {
    build_binary_ses_circuit_with(params, map, PrepMode::Incremental)
}

pub fn build_binary_ses_circuit_with(
    params: &ParameterVector,
    map: &EncodingMap,
    mode: PrepMode,
) -> Result<Circuit, CircuitError> {
    let n_sites = map.n_sites();
    check_len(params, n_sites)?;
    if map.mode() != EncodingMode::Shifted {
        return Err(CircuitError::Encoding("binary chain ansatz needs the shifted encoding".into()));
    }
    let layout = BinaryLayout::for_map(map);
    let n = layout.data_width;
    let (a0, a1) = (layout.carrier, layout.flag);
    let mut c = Circuit::new(layout.width, "binary_ses").with_data_width(n);

    c.push(GateOp::X(a0))?;
    // Codeword currently held by the carrier branch.
    let mut carrier_word = 0u64;
    for (i, &(beta, gamma)) in params.pairs().iter().enumerate() {
        let word = map.codeword(i).bits;
        c.push(GateOp::A { first: a0, second: a1, beta, gamma })?;
        c.push(GateOp::Swap(a0, a1))?;
        match mode {
            PrepMode::Incremental => {
                let diff = flips(carrier_word, word, n);
                prep(&mut c, a1, diff.clone())?;
                unflag(&mut c, &layout, word, a1)?;
                prep(&mut c, a0, diff)?;
                carrier_word = word;
            }
            PrepMode::FromZero => {
                prep(&mut c, a1, flips(0, word, n))?;
                unflag(&mut c, &layout, word, a1)?;
            }
        }
    }
    // Terminal transfer of the remaining carrier amplitude to the last site.
    let last = map.codeword(n_sites - 1).bits;
    prep(&mut c, a0, flips(carrier_word, last, n))?;
    unflag(&mut c, &layout, last, a0)?;
    Ok(c)
}

/// `layers` repetitions of per-qubit Ry, per-qubit Rz and a CNOT ring.
/// Parameters are ordered layer by layer, Ry angles before Rz angles.
pub fn build_hardware_efficient_circuit(n: usize, layers: usize, params: &[f64]) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::InvalidGate("hardware-efficient ansatz needs at least one qubit".into()));
    }
    let expected = 2 * n * layers;
    if params.len() != expected {
        return Err(CircuitError::ParamLength { expected, got: params.len() });
    }
    let mut c = Circuit::new(n, "hardware_efficient");
    for layer in params.chunks(2 * n) {
        for q in 0..n {
            c.push(GateOp::Ry { qubit: q, angle: layer[q] })?;
        }
        for q in 0..n {
            c.push(GateOp::Rz { qubit: q, angle: layer[n + q] })?;
        }
        if n >= 2 {
            for q in 0..n {
                c.push(GateOp::Cx { control: q, target: (q + 1) % n })?;
            }
        }
    }
    Ok(c)
}

/// Width, depth and CNOT count after full decomposition.
pub fn gate_counts(c: &Circuit) -> Result<GateCounts, CircuitError> {
    c.metrics()
}

/// Site amplitudes of the one-hot ansatz, simulated on sparse storage.
pub fn ses_amplitudes(params: &ParameterVector, n_sites: usize) -> Result<Vec<Complex64>, SimError> {
    let state = simulate_ses(params, n_sites)?;
    Ok((0..n_sites).map(|j| state.amplitude(1u64 << j)).collect())
}

/// Final register state of the one-hot ansatz.
pub fn simulate_ses(params: &ParameterVector, n_sites: usize) -> Result<SparseState, SimError> {
    let circuit = build_ses_circuit(params, n_sites)?;
    let mut state = SparseState::new(n_sites)?;
    state.apply_circuit(&circuit)?;
    Ok(state)
}

/// Data-register state of the binary ansatz and the probability found with
/// any ancilla excited.
pub fn simulate_binary_ses(params: &ParameterVector, map: &EncodingMap) -> Result<(StateVector, f64), SimError> {
    let circuit = build_binary_ses_circuit(params, map)?;
    let mut state = StateVector::new(circuit.width())?;
    state.apply_circuit(&circuit)?;
    state.data_register(circuit.data_width())
}

/// Site amplitudes read off the data register through the map.
pub fn binary_ses_amplitudes(params: &ParameterVector, map: &EncodingMap) -> Result<Vec<Complex64>, SimError> {
    let (data, _) = simulate_binary_ses(params, map)?;
    Ok((0..map.n_sites()).map(|k| data.amplitude(map.codeword(k).bits)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn golden_a_gate_at_zero_angles() {
        let m = a_gate_matrix(0.0, 0.0);
        let expected = [1.0, 1.0, -1.0, 1.0];
        for r in 0..4 {
            for c in 0..4 {
                let e = if r == c { expected[r] } else { 0.0 };
                assert!(close(m[r][c], Complex64::new(e, 0.0)), "entry ({r},{c}) = {}", m[r][c]);
            }
        }
    }

    #[test]
    fn a_gate_preserves_weight_sectors() {
        let m = a_gate_matrix(0.8, -2.1);
        assert!(close(m[0][0], Complex64::new(1.0, 0.0)));
        assert!(close(m[3][3], Complex64::new(1.0, 0.0)));
        for k in [1, 2] {
            assert!(m[0][k].norm() < 1e-12 && m[3][k].norm() < 1e-12);
            assert!(m[k][0].norm() < 1e-12 && m[k][3].norm() < 1e-12);
        }
    }

    #[test]
    fn single_site_circuit_is_one_x() {
        let c = build_ses_circuit(&ParameterVector::new(vec![]).unwrap(), 1).unwrap();
        assert_eq!(c.gates(), &[GateOp::X(0)]);
        assert!(build_ses_circuit(&ParameterVector::new(vec![(0.1, 0.2)]).unwrap(), 3).is_err());
    }

    #[test]
    fn hardware_efficient_shapes() {
        let c = build_hardware_efficient_circuit(3, 0, &[]).unwrap();
        assert!(c.is_empty());
        let c = build_hardware_efficient_circuit(3, 2, &[0.0; 12]).unwrap();
        assert_eq!(c.metrics().unwrap().cnot_count, 6);
        assert!(build_hardware_efficient_circuit(3, 2, &[0.0; 11]).is_err());
        let c = build_hardware_efficient_circuit(2, 1, &[0.0; 4]).unwrap();
        let mut s = StateVector::new(2).unwrap();
        s.apply_circuit(&c).unwrap();
        assert!((s.amplitude(0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_circuit_requires_shifted_map() {
        let plain = EncodingMap::build(4, EncodingMode::Plain).unwrap();
        let p = ParameterVector::random(3, 1);
        assert!(matches!(build_binary_ses_circuit(&p, &plain), Err(CircuitError::Encoding(_))));
    }

    #[test]
    fn binary_layout_widths() {
        let m2 = EncodingMap::build(4, EncodingMode::Shifted).unwrap();
        assert_eq!(BinaryLayout::for_map(&m2).width, 4);
        let m3 = EncodingMap::build(8, EncodingMode::Shifted).unwrap();
        assert_eq!(BinaryLayout::for_map(&m3).width, 6);
    }

    /// Site j keeps cos(beta_j) and passes sin(beta_j) e^{-i gamma_j} on.
    fn closed_form(p: &ParameterVector, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n);
        let mut carry = Complex64::new(1.0, 0.0);
        for &(b, g) in p.pairs() {
            out.push(carry * b.cos());
            carry *= Complex64::from_polar(b.sin(), -g);
        }
        out.push(carry);
        out
    }

    #[test]
    fn one_hot_matches_closed_form() {
        for n in 1..=9 {
            let p = ParameterVector::random(n - 1, n as u64);
            let got = ses_amplitudes(&p, n).unwrap();
            for (a, b) in got.iter().zip(closed_form(&p, n)) {
                assert!(close(*a, b), "n={n}");
            }
        }
    }

    #[test]
    fn binary_matches_one_hot_in_both_prep_modes() {
        for n in 1..=9 {
            let map = EncodingMap::build(n, EncodingMode::Shifted).unwrap();
            let p = ParameterVector::random(n - 1, 100 + n as u64);
            let expect = closed_form(&p, n);
            for mode in [PrepMode::Incremental, PrepMode::FromZero] {
                let c = build_binary_ses_circuit_with(&p, &map, mode).unwrap();
                let mut s = StateVector::new(c.width()).unwrap();
                s.apply_circuit(&c).unwrap();
                let (data, leak) = s.data_register(c.data_width()).unwrap();
                assert!(leak < 1e-12, "n={n} {mode:?} leak {leak}");
                for (k, e) in expect.iter().enumerate() {
                    assert!(close(data.amplitude(map.codeword(k).bits), *e), "n={n} {mode:?} site {k}");
                }
            }
        }
    }
}
