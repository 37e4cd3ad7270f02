//! Representations of isotopic pairs and the quantum oscillator dynamics.

pub mod dynamics;
pub mod representation;
pub mod search;

pub use dynamics::{hidden_hamiltonian_audit, integrate_quantum, quantum_rhs, renormalize_rc, HiddenAudit, QuantumTrajectory};
pub use representation::{split_double, verify_representation, PairRepresentation, RepresentationDocument};
pub use search::{find_representation, SearchConfig, SearchResult};
