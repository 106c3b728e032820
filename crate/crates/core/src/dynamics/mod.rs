//! Time evolution: perturbative amplitude equations and direct
//! Crank-Nicolson propagation on the grid.

mod amplitudes;
mod pde;
mod split;

pub use amplitudes::{
    coupling_matrix, matrix_element, project_amplitudes, propagate_amplitudes, AmplitudeOptions,
    AmplitudeVector, NORM_DRIFT_LIMIT,
};
pub use pde::{propagate_wavefunction, GaugeMode, PropagationOptions, WaveTrajectory};
pub use split::{split_hamiltonian, split_separable, PerturbationSplit, SeparableDrive};
