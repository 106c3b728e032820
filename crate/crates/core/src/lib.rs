//! Numerical core of gauge-lab: a charged quantum particle on a grid in
//! classical electromagnetic fields, under arbitrary gauge functions.

pub mod appendixgauge;
pub mod constants;
pub mod convergence;
pub mod dynamics;
pub mod emfields;
pub mod error;
pub mod finite_diff;
pub mod gaugecheck;
pub mod lattice;
pub mod linalg;
pub mod quadrature;
pub mod spectral;

pub use constants::PhysicalConstants;
pub use error::{GaugeLabError, Result};
pub use dynamics::{AmplitudeVector, PerturbationSplit};
pub use emfields::{ChargeCurrentDensity, FieldSet, GaugeFunction, PotentialSet, ScalarTimeField, Vec3, VectorTimeField};
pub use lattice::{GridSpec, HamiltonianMatrix, Wavefunction};
pub use spectral::SpectralBasis;
