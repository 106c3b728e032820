//! Stationary states of the static Hamiltonian, gauged basis functions and
//! the spectral gauge checks.

mod basis;
mod checks;

pub use basis::{
    check_orthonormality, fix_phase, gauged_basis_state, solve_stationary, SpectralBasis,
    DEFAULT_BASIS_SIZE, GRAM_LIMIT, RESIDUAL_LIMIT,
};
pub use checks::{
    cluster_levels, density_deviation, eigenvalue_shift_check, interior_energies, phase_absorption_check,
    weight_within, AbsorptionCheck,
    ShiftCheck, StaticSystem,
};
