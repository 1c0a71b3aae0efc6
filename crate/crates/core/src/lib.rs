//! Numerical toolkit for gapped free-fermion systems and their doubling.
//!
//! A quadratic Hamiltonian on a lattice is paired with a time-reversed copy;
//! the resulting doubled system can be joined to an on-site product state by
//! a family of Hamiltonians whose gap never changes. The crate builds that
//! family and checks its properties: constant gap, locality, cancellation of
//! the Majorana number and real-space Chern marker, Gaussian reduced states
//! and boundary insensitivity, quasi-adiabatic transport of the ground-state
//! projector, and localized Wannier functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod doubling;
pub mod error;
pub mod fit;
pub mod flow;
pub mod gaussian;
pub mod hamiltonian;
pub mod invariants;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod oracles;
pub mod spectral;
pub mod wannier;

pub use error::{Error, Result};
