//! Gauge-covariance checks for grid operators and the Hamiltonian, and the
//! classical equations of motion in arbitrary gauges.

mod classical;
mod operators;

pub use classical::{classical_trajectory, hamilton_equations_trajectory, Trajectory};
pub use operators::{
    canonical_momentum_operator, hamiltonian_transform_residual, kinetic_momentum_operator,
    multiplication_operator, operator_invariance_residual, rate_term_recovery, standard_probes,
    GridOperator, PROBE_SEED,
};
