//! The committed examples under docs/formats stay readable by the library.

use std::path::PathBuf;

use sesq::ansatz::{build_binary_ses_circuit, ParameterVector};
use sesq::encoding::{EncodingMap, EncodingMode};
use sesq::hamiltonian::{chain, HamiltonianFile};
use sesq::Circuit;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/formats").join(name)
}

fn golden_circuit() -> Circuit {
    let params = ParameterVector::new(vec![(0.25, -1.5), (1.0, 0.5)]).unwrap();
    let map = EncodingMap::build(3, EncodingMode::Shifted).unwrap();
    build_binary_ses_circuit(&params, &map).unwrap()
}

#[test]
fn circuit_text_matches_golden() {
    let path = golden("circuit.txt");
    let text = golden_circuit().to_text();
    if std::env::var_os("SESQ_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let committed = std::fs::read_to_string(&path).unwrap();
    assert_eq!(committed, text);
    assert_eq!(Circuit::from_text(&committed).unwrap(), golden_circuit());
}

#[test]
fn hamiltonian_golden_is_the_seeded_chain() {
    let src = std::fs::read_to_string(golden("hamiltonian.json")).unwrap();
    let h = HamiltonianFile::from_json(&src).unwrap().to_hamiltonian().unwrap();
    assert_eq!(h, chain(3, 1.0, 1.0, 1).unwrap());
}
