//! Gate lists with exact CNOT and depth accounting.
//!
//! Depth uses greedy layering: each gate starts in the earliest layer where
//! all of its qubits are free and occupies [`GateOp::layer_span`] layers.

mod gate;
mod text;

pub use gate::{mcx_cnot_cost, CustomGate, GateOp};
pub use text::ParseCircuitError;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("gate is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("composite gate `{0}` must be decomposed before counting")]
    Undecomposed(String),
    #[error("gate `{0}` has no CNOT cost model")]
    NoCostModel(String),
    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ParamLength { expected: usize, got: usize },
    #[error("encoding mismatch: {0}")]
    Encoding(String),
}

/// Width, layered depth and CNOT count of a fully decomposed circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateCounts {
    pub width: usize,
    pub depth: usize,
    pub cnot_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    /// The lowest `data_width` qubits form the data register; anything
    /// above is ancilla space expected to return to |0>.
    data_width: usize,
    label: String,
    gates: Vec<GateOp>,
}

impl Circuit {
    pub fn new(width: usize, label: impl Into<String>) -> Self {
        Self { width, data_width: width, label: label.into(), gates: Vec::new() }
    }

    pub fn with_data_width(mut self, data_width: usize) -> Self {
        self.data_width = data_width.min(self.width);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data_width(&self) -> usize {
        self.data_width
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: GateOp) -> Result<(), CircuitError> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = GateOp>>(&mut self, gates: I) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Recursively expands every composite gate.
    pub fn decomposed(&self) -> Circuit {
        let mut out = Circuit {
            width: self.width,
            data_width: self.data_width,
            label: self.label.clone(),
            gates: Vec::with_capacity(self.gates.len() * 4),
        };
        let mut stack: Vec<GateOp> = Vec::new();
        for g in &self.gates {
            stack.push(g.clone());
            while let Some(top) = stack.pop() {
                let parts = top.decompose();
                if parts.len() == 1 && parts[0] == top {
                    out.gates.push(top);
                } else {
                    stack.extend(parts.into_iter().rev());
                }
            }
        }
        out
    }

    /// Counts for a circuit already made of primitives.
    pub fn gate_counts(&self) -> Result<GateCounts, CircuitError> {
        let mut cnots = 0;
        for g in &self.gates {
            if g.is_composite() {
                return Err(CircuitError::Undecomposed(kind_name(g).to_string()));
            }
            cnots += g
                .cnot_cost()
                .ok_or_else(|| CircuitError::NoCostModel(kind_name(g).to_string()))?;
        }
        Ok(GateCounts { width: self.width, depth: self.depth(), cnot_count: cnots })
    }

    /// Decomposes, then counts.
    pub fn metrics(&self) -> Result<GateCounts, CircuitError> {
        self.decomposed().gate_counts()
    }

    /// Greedy-layered depth of the gate list as written.
    pub fn depth(&self) -> usize {
        let mut free_at = vec![0usize; self.width];
        let mut depth = 0;
        for g in &self.gates {
            let qubits = g.qubits();
            let start = qubits.iter().map(|&q| free_at[q]).max().unwrap_or(0);
            let end = start + g.layer_span();
            for q in qubits {
                free_at[q] = end;
            }
            depth = depth.max(end);
        }
        depth
    }

    pub fn to_text(&self) -> String {
        text::write(self)
    }

    pub fn from_text(src: &str) -> Result<Circuit, ParseCircuitError> {
        text::parse(src)
    }
}

pub(crate) fn kind_name(g: &GateOp) -> &'static str {
    match g {
        GateOp::X(_) => "X",
        GateOp::H(_) => "H",
        GateOp::S(_) => "S",
        GateOp::Sdg(_) => "SDG",
        GateOp::Ry { .. } => "RY",
        GateOp::Rz { .. } => "RZ",
        GateOp::Cx { .. } => "CX",
        GateOp::Swap(..) => "SWAP",
        GateOp::Ccx { .. } => "CCX",
        GateOp::Mcx { helper: None, .. } => "MCX",
        GateOp::Mcx { helper: Some(_), .. } => "MCXH",
        GateOp::A { .. } => "A",
        GateOp::ControlledPrep { .. } => "CPREP",
        GateOp::Unitary(_) => "U",
    }
}
