//! JSON exchange format for site Hamiltonians.
//!
//! ```json
//! { "n_sites": 2, "entries": [[0, 0, 0.5, 0.0], [0, 1, 1.0, 0.0]] }
//! ```
//!
//! Entries are `(row, col, re, im)` for the upper triangle and diagonal.
//! The loader mirrors each entry to its Hermitian partner. Numbers are
//! written in shortest round-trip form, so values reload bit for bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{HamiltonianError, SiteHamiltonian};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub n_sites: usize,
    pub entries: Vec<(usize, usize, f64, f64)>,
    /// Free-form provenance (generator family, seed, parameters).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<serde_json::Value>,
}

impl HamiltonianFile {
    pub fn from_hamiltonian(h: &SiteHamiltonian, source: Option<serde_json::Value>) -> Self {
        let n = h.n_sites();
        let mut entries = Vec::new();
        for r in 0..n {
            for c in r..n {
                let z = h.entry(r, c);
                if r == c || z.re != 0.0 || z.im != 0.0 {
                    entries.push((r, c, z.re, z.im));
                }
            }
        }
        Self { n_sites: n, entries, source }
    }

    pub fn to_hamiltonian(&self) -> Result<SiteHamiltonian, HamiltonianError> {
        let n = self.n_sites;
        if n == 0 {
            return Err(HamiltonianError::Empty);
        }
        let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        let mut seen = DMatrix::from_element(n, n, false);
        for &(r, c, re, im) in &self.entries {
            if r >= n || c >= n {
                return Err(HamiltonianError::File(format!("entry ({r}, {c}) outside {n} sites")));
            }
            let (r, c, z) = if r <= c {
                (r, c, Complex64::new(re, im))
            } else {
                (c, r, Complex64::new(re, -im))
            };
            if seen[(r, c)] {
                return Err(HamiltonianError::File(format!("duplicate entry for ({r}, {c})")));
            }
            seen[(r, c)] = true;
            h[(r, c)] = z;
            if r != c {
                h[(c, r)] = z.conj();
            }
        }
        SiteHamiltonian::from_matrix(h)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, HamiltonianError> {
        serde_json::from_str(s).map_err(|e| HamiltonianError::File(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::random_hermitian;

    #[test]
    fn round_trip_is_exact() {
        let h = random_hermitian(4, 3).unwrap();
        let file = HamiltonianFile::from_hamiltonian(&h, None);
        let back = HamiltonianFile::from_json(&file.to_json()).unwrap().to_hamiltonian().unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn complex_diagonal_is_rejected() {
        let f = HamiltonianFile { n_sites: 1, entries: vec![(0, 0, 1.0, 0.5)], source: None };
        assert!(matches!(f.to_hamiltonian(), Err(HamiltonianError::NonHermitian { .. })));
    }

    #[test]
    fn duplicate_and_out_of_range_entries() {
        let f = HamiltonianFile { n_sites: 2, entries: vec![(0, 1, 1.0, 0.0), (1, 0, 1.0, 0.0)], source: None };
        assert!(f.to_hamiltonian().is_err());
        let f = HamiltonianFile { n_sites: 2, entries: vec![(0, 2, 1.0, 0.0)], source: None };
        assert!(f.to_hamiltonian().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(HamiltonianFile::from_json(r#"{"n_sites": 1, "entries": [], "extra": 1}"#).is_err());
    }
}
