//! Hybrid variational loop.
//!
//! A [`Problem`] fixes the Hamiltonian, ansatz and cost protocol; the
//! optimiser only ever sees a flat parameter vector. Evaluation `i` of a run
//! samples with `derive_seed(seed, i)`, so a run is reproducible from its
//! config alone.

use std::cell::{Cell, RefCell};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ansatz::{build_hardware_efficient_circuit, simulate_binary_ses, simulate_ses, ParameterVector};
use crate::circuit::CircuitError;
use crate::encoding::{register_width, EncodingError, EncodingMap, EncodingMode};
use crate::hamiltonian::{HamiltonianError, PenaltyConfig, SiteHamiltonian};
use crate::measurement::{estimate_energy, EnergyEstimate, MeasurementError, Protocol, ShotMode};
use crate::optim::{nelder_mead, sequential, spsa, SimplexOptions, SpsaOptions, StopReason, StopRule};
use crate::seed::derive_seed;
use crate::sim::{QuantumState, SimError, SparseState, StateVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VqeError {
    #[error("ansatz {ansatz:?} cannot be measured with protocol {protocol:?}")]
    Incompatible { ansatz: AnsatzKind, protocol: CostProtocol },
    #[error("hardware-efficient ansatz on {n_sites} sites needs a penalty to cover {padded} codewords")]
    PenaltyRequired { n_sites: usize, padded: usize },
    #[error("penalty width {got} does not match register width {expected}")]
    PenaltyWidth { expected: usize, got: usize },
    #[error("exact_operator cost is noiseless; shots must be exact")]
    ShotsWithExactOperator,
    #[error("parameter vector has {got} entries, ansatz needs {expected}")]
    ParamLength { expected: usize, got: usize },
    #[error("max_evaluations must be at least 1")]
    NoBudget,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    OneHotSes,
    BinarySes,
    HardwareEfficient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostProtocol {
    Original,
    Binary,
    /// Quadratic form of the simulated amplitudes; no measurement model.
    ExactOperator,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerConfig {
    Simplex(SimplexOptions),
    Spsa(SpsaOptions),
    /// Exact trigonometric coordinate minimisation.
    Sequential,
}

impl OptimizerConfig {
    /// Sequential coordinate minimisation for exact costs, SPSA under shot
    /// noise.
    pub fn default_for(shots: ShotMode) -> Self {
        match shots {
            ShotMode::Exact => Self::Sequential,
            ShotMode::Shots(_) => Self::Spsa(SpsaOptions::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub ansatz: AnsatzKind,
    pub protocol: CostProtocol,
    pub shots: ShotMode,
    pub optimizer: OptimizerConfig,
    pub max_evaluations: usize,
    pub seed: u64,
    pub penalty: Option<PenaltyConfig>,
    /// Hardware-efficient layers; ignored by the chain ansaetze.
    pub layers: usize,
    /// Activity threshold override for reconstruction.
    pub epsilon: Option<f64>,
    /// A run counts as converged when `|relative_error|` is below this.
    pub tolerance: f64,
}

impl VqeConfig {
    /// Exact one-hot run with the default exact-mode optimiser.
    pub fn one_hot_exact(seed: u64) -> Self {
        Self {
            ansatz: AnsatzKind::OneHotSes,
            protocol: CostProtocol::Original,
            shots: ShotMode::Exact,
            optimizer: OptimizerConfig::Sequential,
            max_evaluations: 5000,
            seed,
            penalty: None,
            layers: 2,
            epsilon: None,
            tolerance: 1e-3,
        }
    }
}

/// Prepared Hamiltonian, encoding and cost path for one configuration.
pub struct Problem {
    h: SiteHamiltonian,
    /// `h`, or its penalty extension for a padded hardware-efficient register.
    h_eff: SiteHamiltonian,
    config: VqeConfig,
    map: Option<EncodingMap>,
    n_params: usize,
}

impl Problem {
    pub fn new(h: &SiteHamiltonian, config: &VqeConfig) -> Result<Self, VqeError> {
        use AnsatzKind::*;
        use CostProtocol::*;
        let n_sites = h.n_sites();
        match (config.ansatz, config.protocol) {
            (OneHotSes, Original | ExactOperator) | (BinarySes | HardwareEfficient, Binary | ExactOperator) => {}
            (ansatz, protocol) => return Err(VqeError::Incompatible { ansatz, protocol }),
        }
        if config.protocol == ExactOperator && config.shots != ShotMode::Exact {
            return Err(VqeError::ShotsWithExactOperator);
        }
        if config.max_evaluations == 0 {
            return Err(VqeError::NoBudget);
        }
        let n = register_width(n_sites);
        let (h_eff, map, n_params) = match config.ansatz {
            OneHotSes => (h.clone(), None, 2 * (n_sites - 1)),
            BinarySes => (h.clone(), Some(EncodingMap::build(n_sites, EncodingMode::Shifted)?), 2 * (n_sites - 1)),
            HardwareEfficient => {
                let padded = 1usize << n;
                let h_eff = if padded == n_sites {
                    h.clone()
                } else {
                    let cfg = config.penalty.ok_or(VqeError::PenaltyRequired { n_sites, padded })?;
                    if cfg.width != n {
                        return Err(VqeError::PenaltyWidth { expected: n, got: cfg.width });
                    }
                    h.extend_with_penalty(&cfg)?
                };
                (h_eff, Some(EncodingMap::build(padded, EncodingMode::Plain)?), 2 * n * config.layers)
            }
        };
        Ok(Self { h: h.clone(), h_eff, config: config.clone(), map, n_params })
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn config(&self) -> &VqeConfig {
        &self.config
    }

    fn check(&self, params: &[f64]) -> Result<(), VqeError> {
        if params.len() != self.n_params {
            return Err(VqeError::ParamLength { expected: self.n_params, got: params.len() });
        }
        Ok(())
    }

    fn hardware_state(&self, params: &[f64]) -> Result<StateVector, VqeError> {
        let n = register_width(self.h.n_sites());
        let c = build_hardware_efficient_circuit(n, self.config.layers, params)?;
        let mut s = StateVector::new(n)?;
        s.apply_circuit(&c)?;
        Ok(s)
    }

    /// Amplitudes over the sites of the effective Hamiltonian.
    pub fn amplitudes(&self, params: &[f64]) -> Result<Vec<Complex64>, VqeError> {
        self.check(params)?;
        let n_sites = self.h.n_sites();
        Ok(match self.config.ansatz {
            AnsatzKind::OneHotSes => {
                let s = simulate_ses(&ParameterVector::from_flat(params)?, n_sites)?;
                (0..n_sites).map(|j| s.amplitude(1u64 << j)).collect()
            }
            AnsatzKind::BinarySes => {
                let map = self.map.as_ref().expect("binary map");
                let (data, _) = simulate_binary_ses(&ParameterVector::from_flat(params)?, map)?;
                (0..n_sites).map(|k| data.amplitude(map.codeword(k).bits)).collect()
            }
            AnsatzKind::HardwareEfficient => self.hardware_state(params)?.amplitudes().to_vec(),
        })
    }

    /// Noiseless energy of `params` on the effective Hamiltonian.
    pub fn exact_energy(&self, params: &[f64]) -> Result<f64, VqeError> {
        Ok(self.h_eff.expectation(&self.amplitudes(params)?))
    }

    /// Energy restricted to the physical sites and renormalised, with the
    /// weight found there. Equals [`Self::exact_energy`] for unpadded runs.
    pub fn physical_energy(&self, params: &[f64]) -> Result<(f64, f64), VqeError> {
        let amps = self.amplitudes(params)?;
        let phys = &amps[..self.h.n_sites()];
        let weight: f64 = phys.iter().map(|a| a.norm_sqr()).sum();
        if weight <= 0.0 {
            return Ok((f64::NAN, 0.0));
        }
        Ok((self.h.expectation(phys) / weight, weight))
    }

    pub fn effective_hamiltonian(&self) -> &SiteHamiltonian {
        &self.h_eff
    }

    /// Encoding of the measured data register; `None` for one-hot.
    pub fn map(&self) -> Option<&EncodingMap> {
        self.map.as_ref()
    }

    /// Register the ansatz prepares: the one-hot register, or the data
    /// register of a binary or hardware-efficient circuit.
    pub fn register_state(&self, params: &[f64]) -> Result<RegisterState, VqeError> {
        self.check(params)?;
        Ok(match self.config.ansatz {
            AnsatzKind::OneHotSes => {
                RegisterState::OneHot(simulate_ses(&ParameterVector::from_flat(params)?, self.h.n_sites())?)
            }
            AnsatzKind::BinarySes => {
                let map = self.map.as_ref().expect("binary map");
                RegisterState::Data(simulate_binary_ses(&ParameterVector::from_flat(params)?, map)?.0)
            }
            AnsatzKind::HardwareEfficient => RegisterState::Data(self.hardware_state(params)?),
        })
    }

    /// Full measurement pipeline at `params`, with shots and seed given
    /// explicitly. Not available for the exact-operator cost.
    pub fn measure(&self, params: &[f64], shots: ShotMode, seed: u64) -> Result<EnergyEstimate, VqeError> {
        let protocol = match self.config.protocol {
            CostProtocol::Original => Protocol::Original,
            CostProtocol::Binary => Protocol::Binary,
            CostProtocol::ExactOperator => {
                return Err(VqeError::Incompatible { ansatz: self.config.ansatz, protocol: CostProtocol::ExactOperator })
            }
        };
        let eps = self.config.epsilon;
        Ok(match self.register_state(params)? {
            RegisterState::OneHot(s) => estimate_energy(&self.h_eff, &s, protocol, None, shots, seed, eps)?,
            RegisterState::Data(s) => estimate_energy(&self.h_eff, &s, protocol, self.map(), shots, seed, eps)?,
        })
    }

    /// Cost of evaluation number `index`.
    pub fn evaluate(&self, params: &[f64], index: u64) -> Result<f64, VqeError> {
        match self.config.protocol {
            CostProtocol::ExactOperator => self.exact_energy(params),
            _ => Ok(self.measure(params, self.config.shots, derive_seed(self.config.seed, index))?.energy),
        }
    }
}

/// State handed to a measurement protocol.
#[derive(Clone, Debug)]
pub enum RegisterState {
    OneHot(SparseState),
    Data(StateVector),
}

/// One-off cost evaluation (evaluation index 0).
pub fn evaluate_cost(h: &SiteHamiltonian, config: &VqeConfig, params: &[f64]) -> Result<f64, VqeError> {
    Problem::new(h, config)?.evaluate(params, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeResult {
    pub best_params: Vec<f64>,
    pub best_energy: f64,
    /// `(evaluation index, energy)`.
    pub trace: Vec<(usize, f64)>,
    pub exact_ground: f64,
    pub relative_error: f64,
    pub evaluations_used: usize,
    pub wall_time_s: f64,
    pub status: RunStatus,
    pub stop: StopReason,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Noiseless energy at `best_params`.
    pub best_exact_energy: f64,
    /// Renormalised physical-subspace energy at `best_params` and its weight.
    pub physical_energy: f64,
    pub physical_weight: f64,
    /// Shots spent per evaluation over all settings (0 when exact).
    pub shots_per_evaluation: u64,
}

/// Uniform starting angles in (-pi, pi] from the run seed.
pub fn initial_params(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| std::f64::consts::PI * (1.0 - 2.0 * rng.gen::<f64>())).collect()
}

pub fn optimize(h: &SiteHamiltonian, config: &VqeConfig) -> Result<VqeResult, VqeError> {
    let start = Instant::now();
    let problem = Problem::new(h, config)?;
    let exact_ground = h.ground_energy()?;
    let x0 = initial_params(problem.n_params(), config.seed);
    // Surface setup errors before handing the cost to the optimiser.
    problem.evaluate(&x0, u64::MAX)?;

    let index = Cell::new(0u64);
    let failure: RefCell<Option<VqeError>> = RefCell::new(None);
    let cost = |x: &[f64]| {
        let i = index.get();
        index.set(i + 1);
        problem.evaluate(x, i).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::INFINITY
        })
    };
    let rule = StopRule::for_dim(problem.n_params(), config.max_evaluations);
    let r = match config.optimizer {
        OptimizerConfig::Simplex(o) => nelder_mead(cost, &x0, o, rule),
        OptimizerConfig::Spsa(o) => spsa(cost, &x0, o, rule, derive_seed(config.seed, u64::MAX - 1)),
        OptimizerConfig::Sequential => sequential(cost, &x0, rule),
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }

    let relative_error = (r.best - exact_ground) / exact_ground.abs().max(1e-12);
    let (physical_energy, physical_weight) = problem.physical_energy(&r.best_x)?;
    let settings = match (config.protocol, &problem.map) {
        (CostProtocol::Original, _) => 3,
        (CostProtocol::Binary, Some(m)) => 2 * m.width() as u64 + 1,
        _ => 0,
    };
    let shots_per_evaluation = match config.shots {
        ShotMode::Exact => 0,
        ShotMode::Shots(s) => s * settings,
    };
    Ok(VqeResult {
        best_exact_energy: problem.exact_energy(&r.best_x)?,
        best_params: r.best_x,
        best_energy: r.best,
        trace: r.trace.into_iter().enumerate().collect(),
        exact_ground,
        relative_error,
        evaluations_used: index.get() as usize,
        wall_time_s: start.elapsed().as_secs_f64(),
        status: if relative_error.abs() < config.tolerance { RunStatus::Converged } else { RunStatus::NotConverged },
        stop: r.stop,
        initial_params: x0,
        final_params: r.final_x,
        physical_energy,
        physical_weight,
        shots_per_evaluation,
    })
}

/// Independent runs, one per seed, in parallel.
pub fn optimize_seeds(h: &SiteHamiltonian, config: &VqeConfig, seeds: &[u64]) -> Vec<Result<VqeResult, VqeError>> {
    seeds
        .par_iter()
        .map(|&seed| optimize(h, &VqeConfig { seed, ..config.clone() }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{chain, random_hermitian};
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn single_site_cost_is_diagonal() {
        let h = SiteHamiltonian::from_real(1, &[-0.7]).unwrap();
        let cfg = VqeConfig::one_hot_exact(1);
        assert!((evaluate_cost(&h, &cfg, &[]).unwrap() + 0.7).abs() < 1e-12);
        let r = optimize(&h, &cfg).unwrap();
        assert_eq!(r.evaluations_used, 1);
        assert_eq!(r.status, RunStatus::Converged);
    }

    #[test]
    fn antisymmetric_pair_reaches_minus_one() {
        let h = SiteHamiltonian::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        // cos(pi/4) on site 0, sin(pi/4) e^{-i pi} on site 1.
        for protocol in [CostProtocol::Original, CostProtocol::ExactOperator] {
            let cfg = VqeConfig { protocol, ..VqeConfig::one_hot_exact(0) };
            assert!((evaluate_cost(&h, &cfg, &[FRAC_PI_4, PI]).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measured_cost_matches_quadratic_form() {
        let h = random_hermitian(8, 5).unwrap();
        for (ansatz, protocol) in [(AnsatzKind::OneHotSes, CostProtocol::Original), (AnsatzKind::BinarySes, CostProtocol::Binary)] {
            let cfg = VqeConfig { ansatz, protocol, ..VqeConfig::one_hot_exact(0) };
            let p = Problem::new(&h, &cfg).unwrap();
            let x = initial_params(p.n_params(), 3);
            assert!((p.evaluate(&x, 0).unwrap() - p.exact_energy(&x).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn two_site_chain_converges_quickly() {
        let h = chain(2, 1.0, 0.0, 0).unwrap();
        let cfg = VqeConfig {
            max_evaluations: 200,
            optimizer: OptimizerConfig::Simplex(SimplexOptions::default()),
            ..VqeConfig::one_hot_exact(4)
        };
        let r = optimize(&h, &cfg).unwrap();
        assert!(r.relative_error.abs() < 1e-6, "{}", r.relative_error);
        assert!(r.evaluations_used <= 200);
    }

    #[test]
    fn incompatible_and_missing_penalty() {
        let h = chain(3, 1.0, 0.0, 0).unwrap();
        let bad = VqeConfig { ansatz: AnsatzKind::BinarySes, ..VqeConfig::one_hot_exact(0) };
        assert!(matches!(Problem::new(&h, &bad), Err(VqeError::Incompatible { .. })));
        let he = VqeConfig { ansatz: AnsatzKind::HardwareEfficient, protocol: CostProtocol::Binary, ..VqeConfig::one_hot_exact(0) };
        assert!(matches!(Problem::new(&h, &he), Err(VqeError::PenaltyRequired { .. })));
        let shots = VqeConfig { protocol: CostProtocol::ExactOperator, shots: ShotMode::Shots(10), ..VqeConfig::one_hot_exact(0) };
        assert!(matches!(Problem::new(&h, &shots), Err(VqeError::ShotsWithExactOperator)));
    }

    #[test]
    fn trace_is_deterministic() {
        let h = chain(4, 1.0, 0.5, 2).unwrap();
        let cfg = VqeConfig { max_evaluations: 300, ..VqeConfig::one_hot_exact(11) };
        let a = optimize(&h, &cfg).unwrap();
        let b = optimize(&h, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
    }
}
