//! Line-oriented circuit exchange format.
//!
//! ```text
//! WIDTH 5
//! DATA 3
//! LABEL binary_ses
//! GATE X 3
//! GATE A 3,4 0.25 -1.5
//! GATE MCXH 0,1,2,4,5
//! ```
//!
//! Qubit lists are comma separated with controls before targets. `MCXH`
//! lists controls, target, then the helper. `CPREP` lists the control
//! first. Angles are written in shortest round-trip decimal form, so a
//! write/parse cycle reproduces every angle bit for bit.

use num_complex::Complex64;
use thiserror::Error;

use super::{kind_name, Circuit, CircuitError, CustomGate, GateOp};

#[derive(Debug, Error, PartialEq)]
pub enum ParseCircuitError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Gate { line: usize, source: CircuitError },
    #[error("missing WIDTH header")]
    MissingWidth,
}

pub(super) fn write(c: &Circuit) -> String {
    let mut out = format!("WIDTH {}\n", c.width());
    if c.data_width() != c.width() {
        out.push_str(&format!("DATA {}\n", c.data_width()));
    }
    if !c.label().is_empty() {
        out.push_str(&format!("LABEL {}\n", c.label()));
    }
    for g in c.gates() {
        let qubits: Vec<String> = g.qubits().iter().map(|q| q.to_string()).collect();
        out.push_str("GATE ");
        out.push_str(kind_name(g));
        out.push(' ');
        out.push_str(&qubits.join(","));
        for a in angles(g) {
            out.push_str(&format!(" {a:?}"));
        }
        out.push('\n');
    }
    out
}

fn angles(g: &GateOp) -> Vec<f64> {
    match g {
        GateOp::Ry { angle, .. } | GateOp::Rz { angle, .. } => vec![*angle],
        GateOp::A { beta, gamma, .. } => vec![*beta, *gamma],
        GateOp::Unitary(u) => u.matrix().iter().flat_map(|z| [z.re, z.im]).collect(),
        _ => Vec::new(),
    }
}

pub(super) fn parse(src: &str) -> Result<Circuit, ParseCircuitError> {
    let mut width = None;
    let mut data = None;
    let mut label = String::new();
    let mut gates = Vec::new();

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: &str| ParseCircuitError::Syntax { line: line_no, msg: msg.to_string() };
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "WIDTH" => width = Some(rest.trim().parse::<usize>().map_err(|_| syntax("bad WIDTH"))?),
            "DATA" => data = Some(rest.trim().parse::<usize>().map_err(|_| syntax("bad DATA"))?),
            "LABEL" => label = rest.trim().to_string(),
            "GATE" => {
                let mut fields = rest.split_whitespace();
                let kind = fields.next().ok_or_else(|| syntax("missing gate kind"))?;
                let qubits: Vec<usize> = match fields.next() {
                    Some(q) => q
                        .split(',')
                        .map(|s| s.parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| syntax("bad qubit list"))?,
                    None => return Err(syntax("missing qubit list")),
                };
                let params: Vec<f64> = fields
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| syntax("bad angle"))?;
                let gate = build_gate(kind, &qubits, &params)
                    .map_err(|e| ParseCircuitError::Gate { line: line_no, source: e })?;
                gates.push((line_no, gate));
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }

    let width = width.ok_or(ParseCircuitError::MissingWidth)?;
    let mut circuit = Circuit::new(width, label);
    if let Some(d) = data {
        circuit = circuit.with_data_width(d);
    }
    for (line, g) in gates {
        circuit.push(g).map_err(|e| ParseCircuitError::Gate { line, source: e })?;
    }
    Ok(circuit)
}

fn build_gate(kind: &str, q: &[usize], p: &[f64]) -> Result<GateOp, CircuitError> {
    let arity = |n: usize, m: usize| -> Result<(), CircuitError> {
        if q.len() != n || p.len() != m {
            Err(CircuitError::InvalidGate(format!(
                "{kind} expects {n} qubit(s) and {m} angle(s), got {} and {}",
                q.len(),
                p.len()
            )))
        } else {
            Ok(())
        }
    };
    let gate = match kind {
        "X" => {
            arity(1, 0)?;
            GateOp::X(q[0])
        }
        "H" => {
            arity(1, 0)?;
            GateOp::H(q[0])
        }
        "S" => {
            arity(1, 0)?;
            GateOp::S(q[0])
        }
        "SDG" => {
            arity(1, 0)?;
            GateOp::Sdg(q[0])
        }
        "RY" => {
            arity(1, 1)?;
            GateOp::Ry { qubit: q[0], angle: p[0] }
        }
        "RZ" => {
            arity(1, 1)?;
            GateOp::Rz { qubit: q[0], angle: p[0] }
        }
        "CX" => {
            arity(2, 0)?;
            GateOp::Cx { control: q[0], target: q[1] }
        }
        "SWAP" => {
            arity(2, 0)?;
            GateOp::Swap(q[0], q[1])
        }
        "CCX" => {
            arity(3, 0)?;
            GateOp::Ccx { controls: [q[0], q[1]], target: q[2] }
        }
        "MCX" => {
            if q.is_empty() || !p.is_empty() {
                return Err(CircuitError::InvalidGate("MCX expects controls and a target".into()));
            }
            let (target, controls) = q.split_last().expect("non-empty");
            GateOp::Mcx { controls: controls.to_vec(), target: *target, helper: None }
        }
        "MCXH" => {
            if q.len() < 2 || !p.is_empty() {
                return Err(CircuitError::InvalidGate("MCXH expects controls, target and helper".into()));
            }
            let (helper, rest) = q.split_last().expect("non-empty");
            let (target, controls) = rest.split_last().expect("non-empty");
            GateOp::Mcx { controls: controls.to_vec(), target: *target, helper: Some(*helper) }
        }
        "A" => {
            arity(2, 2)?;
            GateOp::A { first: q[0], second: q[1], beta: p[0], gamma: p[1] }
        }
        "CPREP" => {
            if q.is_empty() || !p.is_empty() {
                return Err(CircuitError::InvalidGate("CPREP expects a control".into()));
            }
            GateOp::ControlledPrep { control: q[0], targets: q[1..].to_vec() }
        }
        "U" => {
            if p.len() % 2 != 0 {
                return Err(CircuitError::InvalidGate("U needs (re, im) pairs".into()));
            }
            let m = p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            GateOp::Unitary(CustomGate::new(q.to_vec(), m)?)
        }
        other => return Err(CircuitError::InvalidGate(format!("unknown gate kind `{other}`"))),
    };
    Ok(gate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_gates() {
        let src = "# demo\nWIDTH 5\nDATA 2\nGATE X 2\nGATE A 2,3 0.5 -0.25\nGATE MCXH 0,1,2,3,4\nGATE CPREP 3,0,1\n";
        let c = Circuit::from_text(src).unwrap();
        assert_eq!(c.width(), 5);
        assert_eq!(c.data_width(), 2);
        assert_eq!(c.len(), 4);
        assert_eq!(c.gates()[2], GateOp::Mcx { controls: vec![0, 1, 2], target: 3, helper: Some(4) });
    }

    #[test]
    fn rejects_unknown_kind_and_missing_width() {
        assert!(matches!(Circuit::from_text("GATE X 0\n"), Err(ParseCircuitError::MissingWidth)));
        assert!(matches!(
            Circuit::from_text("WIDTH 1\nGATE FOO 0\n"),
            Err(ParseCircuitError::Gate { line: 2, .. })
        ));
        assert!(matches!(
            Circuit::from_text("WIDTH 1\nGATE X 1\n"),
            Err(ParseCircuitError::Gate { line: 2, source: CircuitError::QubitOutOfRange { .. } })
        ));
    }
}
