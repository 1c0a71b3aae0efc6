//! Independent reference computations used to validate the fast routines:
//! Fock-space exact diagonalization, the perfect-matching Pfaffian, the
//! momentum-space Chern number and the two-mode product state.
//!
//! They share no numerical code path with the modules they check.

pub mod fock;
pub mod matchings;
pub mod tknn;
pub mod two_mode;
