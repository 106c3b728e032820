//! Analytic fields, potentials, sources and gauge functions.

pub mod catalog;
pub mod field;
pub mod gauge;
pub mod line_integrals;
pub mod potentials;
pub mod sources;

pub use field::{DerivativeCheck, DomainBox, ScalarTimeField, Vec3, VectorTimeField};
pub use gauge::{GaugeFunction, TimeFn, GaugeValidation, SeparableForm};
pub use line_integrals::{loop_emf, multipolar_point, multipolar_potentials, physical_potential, work};
pub use potentials::{apply_gauge_transform, derive_fields, FieldSet, PotentialSet};
pub use sources::{static_potentials, ChargeCurrentDensity, SourceElements, SourceQuadrature};
