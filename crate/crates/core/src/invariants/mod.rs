//! Topological invariants: Pfaffians and the Majorana number of 1D chains,
//! and the real-space Chern marker of 2D projectors.

pub mod chern;
pub mod majorana;
pub mod pfaffian;

pub use chern::{chern_marker, real_space_chern, ChernValue, ProjectorBlocks, SectorPartition};
pub use majorana::{majorana_number, state_even, state_odd, MAJORANA_PURITY_TOLERANCE};
pub use pfaffian::{pfaffian, SkewMatrix};
