//! Site-basis Hamiltonians: validation, qubit-operator form, penalty
//! extension, dense diagonalisation and the single-excitation energy
//! functional.

mod file;
mod generate;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::profile::AmplitudeProfile;
use crate::sim::{Pauli, PauliString, QuantumState, SimError};

pub use file::HamiltonianFile;
pub use generate::{chain, complex_ring, random_hermitian, InstanceFamily};

/// Hermiticity tolerance on `|h_jk - conj(h_kj)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest Hamiltonian handed to the dense eigensolver.
pub const MAX_DENSE_SITES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("Hamiltonian must have at least one site")]
    Empty,
    #[error("matrix is not square (row {row} has {len} entries, expected {expected})")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not Hermitian at ({row}, {col}): deviation {deviation:.3e}")]
    NonHermitian { row: usize, col: usize, deviation: f64 },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("penalty strength must be positive and finite, got {0}")]
    PenaltyStrength(f64),
    #[error("register of {width} qubits cannot hold {n_sites} sites")]
    PenaltyWidth { width: usize, n_sites: usize },
    #[error("{0} sites exceed the dense diagonalisation budget of {MAX_DENSE_SITES}")]
    TooLarge(usize),
    #[error("profile has {got} sites, Hamiltonian has {expected}")]
    ProfileLength { expected: usize, got: usize },
    #[error("profile probabilities sum to {0}, above 1")]
    ProfileNorm(f64),
    #[error("phase requested for inactive site in pair ({0}, {1})")]
    MissingPhase(usize, usize),
    #[error("Hamiltonian file: {0}")]
    File(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Hermitian N x N matrix of on-site energies and hoppings.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteHamiltonian {
    h: DMatrix<Complex64>,
}

impl SiteHamiltonian {
    /// Checks squareness, finiteness and Hermiticity of a row-major matrix.
    pub fn validate(rows: Vec<Vec<Complex64>>) -> Result<Self, HamiltonianError> {
        let n = rows.len();
        if n == 0 {
            return Err(HamiltonianError::Empty);
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(HamiltonianError::NonSquare { row: r, len: row.len(), expected: n });
            }
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }

    pub fn from_matrix(h: DMatrix<Complex64>) -> Result<Self, HamiltonianError> {
        if h.nrows() == 0 {
            return Err(HamiltonianError::Empty);
        }
        if h.nrows() != h.ncols() {
            return Err(HamiltonianError::NonSquare { row: 0, len: h.ncols(), expected: h.nrows() });
        }
        let n = h.nrows();
        for r in 0..n {
            for c in 0..n {
                let z = h[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(HamiltonianError::NonFinite(r, c));
                }
                let dev = (z - h[(c, r)].conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(HamiltonianError::NonHermitian { row: r, col: c, deviation: dev });
                }
            }
        }
        Ok(Self { h })
    }

    /// Real symmetric convenience constructor from row-major data.
    pub fn from_real(n: usize, data: &[f64]) -> Result<Self, HamiltonianError> {
        if n == 0 {
            return Err(HamiltonianError::Empty);
        }
        if data.len() != n * n {
            return Err(HamiltonianError::NonSquare { row: 0, len: data.len(), expected: n * n });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |r, c| Complex64::new(data[r * n + c], 0.0)))
    }

    pub fn n_sites(&self) -> usize {
        self.h.nrows()
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.h[(j, k)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    /// `alpha^dagger h alpha` for site amplitudes.
    pub fn expectation(&self, alpha: &[Complex64]) -> f64 {
        let n = self.n_sites();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..n {
                row += self.h[(j, k)] * alpha[k];
            }
            acc += alpha[j].conj() * row;
        }
        acc.re
    }

    /// Qubit operator on an N-qubit one-hot register. Zero coefficients are
    /// omitted.
    pub fn pauli_decompose(&self) -> PauliTermList {
        let n = self.n_sites();
        let mut terms = Vec::new();
        let mut offset = 0.0;
        for k in 0..n {
            let e = self.h[(k, k)].re;
            if e != 0.0 {
                offset += e / 2.0;
                terms.push(PauliTerm::new(-e / 2.0, PauliString::from_sparse(n, &[(k, Pauli::Z)])));
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                let z = self.h[(j, k)];
                if z.re != 0.0 {
                    let c = z.re / 2.0;
                    terms.push(PauliTerm::new(c, PauliString::from_sparse(n, &[(j, Pauli::X), (k, Pauli::X)])));
                    terms.push(PauliTerm::new(c, PauliString::from_sparse(n, &[(j, Pauli::Y), (k, Pauli::Y)])));
                }
                if z.im != 0.0 {
                    let c = z.im / 2.0;
                    terms.push(PauliTerm::new(c, PauliString::from_sparse(n, &[(j, Pauli::Y), (k, Pauli::X)])));
                    terms.push(PauliTerm::new(-c, PauliString::from_sparse(n, &[(j, Pauli::X), (k, Pauli::Y)])));
                }
            }
        }
        PauliTermList { num_qubits: n, terms, constant_offset: offset }
    }

    /// Embeds `h` in a 2^width site space whose extra configurations each
    /// cost the penalty strength; cross blocks are zero.
    pub fn extend_with_penalty(&self, cfg: &PenaltyConfig) -> Result<SiteHamiltonian, HamiltonianError> {
        let n = self.n_sites();
        let dim = 1usize
            .checked_shl(cfg.width as u32)
            .ok_or(HamiltonianError::PenaltyWidth { width: cfg.width, n_sites: n })?;
        if dim < n {
            return Err(HamiltonianError::PenaltyWidth { width: cfg.width, n_sites: n });
        }
        let mut ext = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        ext.view_mut((0, 0), (n, n)).copy_from(&self.h);
        for d in n..dim {
            ext[(d, d)] = Complex64::new(cfg.strength, 0.0);
        }
        Ok(SiteHamiltonian { h: ext })
    }

    /// Ascending eigenvalues.
    pub fn exact_spectrum(&self) -> Result<Vec<f64>, HamiltonianError> {
        Ok(self.eigen()?.0)
    }

    /// Ascending eigenvalues with matching unit eigenvectors as columns.
    pub fn eigen(&self) -> Result<(Vec<f64>, DMatrix<Complex64>), HamiltonianError> {
        let n = self.n_sites();
        if n > MAX_DENSE_SITES {
            return Err(HamiltonianError::TooLarge(n));
        }
        let eig = SymmetricEigen::new(self.h.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    pub fn ground_energy(&self) -> Result<f64, HamiltonianError> {
        Ok(self.exact_spectrum()?[0])
    }

    /// Largest minus smallest eigenvalue.
    pub fn spectral_range(&self) -> Result<f64, HamiltonianError> {
        let s = self.exact_spectrum()?;
        Ok(s[s.len() - 1] - s[0])
    }

    /// Ten times the larger of the spectral range and the largest
    /// eigenvalue magnitude (1 when both vanish). Always above every
    /// eigenvalue of `h`, so padding never lowers the ground energy.
    pub fn default_penalty_strength(&self) -> Result<f64, HamiltonianError> {
        let s = self.exact_spectrum()?;
        let range = s[s.len() - 1] - s[0];
        let scale = range.max(s[0].abs()).max(s[s.len() - 1].abs());
        Ok(10.0 * if scale > 0.0 { scale } else { 1.0 })
    }

    /// Energy of the single-excitation state described by `profile`:
    ///
    /// ```text
    /// E = sum_k h_kk |a_k|^2
    ///   + 2 sum_{j<k} |a_j||a_k| [Re h_jk cos(d) - Im h_jk sin(d)]
    /// ```
    ///
    /// with `d = theta_k - theta_j`. Pairs with an inactive endpoint drop
    /// out; an active site without a phase is an error.
    pub fn energy_from_profile(&self, profile: &AmplitudeProfile) -> Result<f64, HamiltonianError> {
        let n = self.n_sites();
        if profile.n_sites() != n {
            return Err(HamiltonianError::ProfileLength { expected: n, got: profile.n_sites() });
        }
        let total = profile.probability_sum();
        if total > 1.0 + 1e-6 {
            return Err(HamiltonianError::ProfileNorm(total));
        }
        let m = &profile.magnitudes;
        let mut e: f64 = (0..n).map(|k| self.h[(k, k)].re * m[k] * m[k]).sum();
        for j in 0..n {
            if !profile.active[j] {
                continue;
            }
            for k in j + 1..n {
                if !profile.active[k] {
                    continue;
                }
                let h = self.h[(j, k)];
                if h.re == 0.0 && h.im == 0.0 {
                    continue;
                }
                let (tj, tk) = match (profile.phases[j], profile.phases[k]) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(HamiltonianError::MissingPhase(j, k)),
                };
                let (s, c) = (tk - tj).sin_cos();
                e += 2.0 * m[j] * m[k] * (h.re * c - h.im * s);
            }
        }
        Ok(e)
    }
}

/// Penalty strength and target register width.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyConfig {
    pub strength: f64,
    pub width: usize,
}

impl PenaltyConfig {
    pub fn new(strength: f64, width: usize) -> Result<Self, HamiltonianError> {
        if !(strength.is_finite() && strength > 0.0) {
            return Err(HamiltonianError::PenaltyStrength(strength));
        }
        Ok(Self { strength, width })
    }

    /// Default strength for `h` on the narrowest register that holds it.
    pub fn default_for(h: &SiteHamiltonian) -> Result<Self, HamiltonianError> {
        Self::new(h.default_penalty_strength()?, crate::encoding::register_width(h.n_sites()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        Self { coefficient, string }
    }
}

/// Real-weighted sum of Pauli strings plus a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTermList {
    pub num_qubits: usize,
    pub terms: Vec<PauliTerm>,
    pub constant_offset: f64,
}

impl PauliTermList {
    /// Dense 2^q x 2^q operator (q <= 12).
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>, HamiltonianError> {
        if self.num_qubits > 12 {
            return Err(HamiltonianError::TooLarge(1 << self.num_qubits.min(30)));
        }
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for d in 0..dim {
            m[(d, d)] += self.constant_offset;
        }
        for t in &self.terms {
            for b in 0..dim {
                let (b2, f) = t.string.apply_to_basis(b as u64);
                m[(b2 as usize, b)] += f * t.string.coefficient() * t.coefficient;
            }
        }
        Ok(m)
    }

    /// `sum_i c_i <P_i> + offset` on a simulated register.
    pub fn expectation<S: QuantumState>(&self, state: &S) -> Result<f64, HamiltonianError> {
        let mut e = self.constant_offset;
        for t in &self.terms {
            e += t.coefficient * state.expectation_pauli(&t.string)?;
        }
        Ok(e)
    }
}
