//! Spin networks built from perfect-state-transfer chains.
//!
//! Chains with engineered couplings are fused into larger networks by a
//! Hadamard-block unitary, driven by single-site phase injections, and
//! scored by fidelity or entanglement of formation, optionally averaged
//! over static disorder ensembles. Everything lives in the
//! single-excitation subspace, so an `N`-site network is an `N x N`
//! Hamiltonian.

pub mod cli;
pub mod contour;
pub mod disorder;
pub mod dynamics;
pub mod ensemble;
pub mod linalg;
pub mod network;
pub mod observables;
pub mod protocols;
