//! Seeded instance families.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{HamiltonianError, SiteHamiltonian};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceFamily {
    Chain,
    RandomHermitian,
    ComplexRing,
}

impl FromStr for InstanceFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(Self::Chain),
            "random_hermitian" => Ok(Self::RandomHermitian),
            "complex_ring" => Ok(Self::ComplexRing),
            other => Err(format!("unknown family `{other}` (expected chain, random_hermitian or complex_ring)")),
        }
    }
}

impl InstanceFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::Chain => "chain",
            Self::RandomHermitian => "random_hermitian",
            Self::ComplexRing => "complex_ring",
        }
    }
}

/// Open chain with uniform hopping `t` and on-site energies drawn
/// uniformly from `[-disorder/2, disorder/2]`.
pub fn chain(n: usize, hopping: f64, disorder: f64, seed: u64) -> Result<SiteHamiltonian, HamiltonianError> {
    if n == 0 {
        return Err(HamiltonianError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        if disorder != 0.0 {
            h[(j, j)] = Complex64::new(disorder * (rng.gen::<f64>() - 0.5), 0.0);
        }
        if j + 1 < n {
            h[(j, j + 1)] = Complex64::new(hopping, 0.0);
            h[(j + 1, j)] = Complex64::new(hopping, 0.0);
        }
    }
    SiteHamiltonian::from_matrix(h)
}

/// Dense Hermitian matrix: real N(0,1) diagonal, off-diagonal entries with
/// independent N(0, 1/2) real and imaginary parts.
pub fn random_hermitian(n: usize, seed: u64) -> Result<SiteHamiltonian, HamiltonianError> {
    if n == 0 {
        return Err(HamiltonianError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        h[(j, j)] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for k in j + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re * s, im * s);
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
        }
    }
    SiteHamiltonian::from_matrix(h)
}

/// Closed ring threaded by a flux: every bond carries `t * exp(i flux / N)`.
/// On-site disorder as for [`chain`]. Two sites reduce to a single bond.
pub fn complex_ring(
    n: usize,
    hopping: f64,
    flux: f64,
    disorder: f64,
    seed: u64,
) -> Result<SiteHamiltonian, HamiltonianError> {
    if n == 0 {
        return Err(HamiltonianError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let bond = Complex64::from_polar(hopping, flux / n as f64);
    for j in 0..n {
        if disorder != 0.0 {
            h[(j, j)] = Complex64::new(disorder * (rng.gen::<f64>() - 0.5), 0.0);
        }
    }
    let bonds = if n > 2 { n } else { n - 1 };
    for j in 0..bonds {
        let k = (j + 1) % n;
        h[(j, k)] += bond;
        h[(k, j)] += bond.conj();
    }
    SiteHamiltonian::from_matrix(h)
}
