//! Lewis-Riesenfeld invariant solver for the two-dimensional anisotropic
//! harmonic oscillator in a time-dependent magnetic field, including the
//! noncommutative-space variant mapped in through a Bopp shift.
//!
//! The pipeline: assemble the quadratic Hamiltonian, integrate the
//! invariant-coefficient flow, diagonalize the invariant symplectically,
//! build the Gaussian ground state, accumulate geometric and dynamical
//! phases, and test bipartite separability.

pub mod cli;
pub mod config;
pub mod draws;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod invariant;
pub mod model;
pub mod ode;
pub mod output;
pub mod phases;
pub mod separability;
pub mod spectral;
pub mod symplectic;

#[cfg(test)]
pub(crate) use draws as testutil;

pub use error::{Error, Result};
