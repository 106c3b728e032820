//! Grid discretization of wavefunctions and of the minimal-coupling
//! Hamiltonian.

mod grid;
mod hamiltonian;
mod identity;
mod wavefunction;

pub use grid::{Axis, GridSpec, MIN_POINTS};
pub use hamiltonian::{build_hamiltonian, HamiltonianMatrix};
pub(crate) use hamiltonian::sample_fields;
pub use identity::{identity_9_residual, kinetic_momentum_power};
pub use wavefunction::{apply_phase, inner_product, Wavefunction, NORMALIZATION_TOLERANCE};
pub(crate) use wavefunction::raw_inner;
