//! Linear-algebra kernels: tridiagonal and banded factorizations,
//! shift-invert block Lanczos, conjugate gradients.

pub mod banded;
pub mod cg;
pub mod lanczos;
pub mod tridiagonal;

pub use banded::BandCholesky;
pub use lanczos::{lowest_eigenpairs, LanczosOptions, LanczosOutcome};
pub use tridiagonal::{dot, hermitian_tridiagonal_lowest, norm, normalize, TridiagonalLu};
