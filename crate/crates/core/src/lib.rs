//! Single-excitation subspace simulation and variational solving.

pub mod ansatz;
pub mod circuit;
pub mod encoding;
pub mod hamiltonian;
pub mod measurement;
pub mod optim;
pub mod profile;
pub mod resources;
pub mod seed;
pub mod vqe;
pub mod sim;

pub use circuit::{Circuit, GateOp};
pub use encoding::{EncodingMap, EncodingMode};
pub use hamiltonian::SiteHamiltonian;
pub use profile::AmplitudeProfile;
pub use sim::{QuantumState, SparseState, StateVector};
