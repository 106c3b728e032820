use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::GridSpec;
use super::wavefunction::Wavefunction;
use crate::constants::PhysicalConstants;
use crate::emfields::{GaugeFunction, PotentialSet, Vec3};
use crate::error::{GaugeLabError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const PARALLEL_MIN: usize = 4096;

/// Sparse Hermitian operator on a grid: a diagonal plus nearest-neighbour
/// couplings along each axis.
///
/// `forward[a][j] = H(j, j + s_a)` and `backward[a][j] = H(j, j - s_a)`, both
/// stored row by row; entries with no neighbour are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub grid: GridSpec,
    pub diagonal: Vec<Complex64>,
    pub forward: Vec<Vec<Complex64>>,
    pub backward: Vec<Vec<Complex64>>,
    pub label: String,
    pub time: f64,
    pub constants: PhysicalConstants,
}

/// Potentials sampled at the grid nodes.
pub(crate) struct NodeFields {
    /// `A + grad chi`.
    pub vector: Vec<Vec3>,
    /// `phi - d chi / dt`.
    pub scalar: Vec<f64>,
}

pub(crate) fn sample_fields(
    p: &PotentialSet,
    chi: &GaugeFunction,
    grid: &GridSpec,
    t: f64,
) -> Result<NodeFields> {
    let bbox = grid.bounding_box();
    if !p.domain().contains_box(&bbox) {
        return Err(GaugeLabError::DomainMismatch(format!(
            "potentials `{}` do not cover the grid box",
            p.label
        )));
    }
    if !chi.domain().contains_box(&bbox) {
        return Err(GaugeLabError::DomainMismatch(format!(
            "gauge function `{}` does not cover the grid box",
            chi.name()
        )));
    }
    let positions = grid.positions();
    let eval = |r: &Vec3| {
        (
            p.vector.value(r, t) + chi.gradient(r, t),
            p.scalar.value(r, t) - chi.rate(r, t),
        )
    };
    let pairs: Vec<(Vec3, f64)> = if positions.len() >= PARALLEL_MIN {
        positions.par_iter().map(eval).collect()
    } else {
        positions.iter().map(eval).collect()
    };
    let (vector, scalar) = pairs.into_iter().unzip();
    Ok(NodeFields { vector, scalar })
}

/// Assembles `{p - e(A + grad chi)}^2 / 2m + e(phi - d chi/dt)` with
/// `p = -i hbar grad` by central differences and Dirichlet walls.
///
/// The cross term is the average of the divergence and advection forms,
/// `(i e hbar / 2m) [div(A psi) + A . grad psi]`, which keeps the matrix
/// Hermitian for any `A`. Only the vector-potential components along the
/// grid axes enter; the particle does not move along the others.
pub fn build_hamiltonian(
    p: &PotentialSet,
    chi: &GaugeFunction,
    grid: &GridSpec,
    t: f64,
    c: &PhysicalConstants,
) -> Result<HamiltonianMatrix> {
    let fields = sample_fields(p, chi, grid, t)?;
    Ok(assemble(
        grid,
        &fields,
        t,
        c,
        format!("{}|{}", p.label, chi.name()),
    ))
}

pub(crate) fn assemble(
    grid: &GridSpec,
    fields: &NodeFields,
    t: f64,
    c: &PhysicalConstants,
    label: String,
) -> HamiltonianMatrix {
    let n = grid.len();
    let dim = grid.dim();
    let (hbar, e, m) = (c.hbar, c.charge, c.mass);
    let zero = Complex64::new(0.0, 0.0);
    let mut diagonal = vec![zero; n];
    let mut forward = vec![vec![zero; n]; dim];
    let mut backward = vec![vec![zero; n]; dim];
    for j in 0..n {
        let a = &fields.vector[j];
        let mut d = e * fields.scalar[j];
        for ax in 0..dim {
            d += e * e * a[ax] * a[ax] / (2.0 * m);
        }
        diagonal[j] = Complex64::new(d, 0.0);
    }
    for ax in 0..dim {
        let h = grid.spacing(ax);
        let s = grid.stride(ax);
        let kin = hbar * hbar / (2.0 * m * h * h);
        let cross = e * hbar / (2.0 * m) / (2.0 * h);
        for j in 0..n {
            diagonal[j] += 2.0 * kin;
            let aj = fields.vector[j][ax];
            if grid.has_forward(j, ax) {
                let avg = fields.vector[j + s][ax] + aj;
                forward[ax][j] = Complex64::new(-kin, cross * avg);
            }
            if grid.has_backward(j, ax) {
                let avg = fields.vector[j - s][ax] + aj;
                backward[ax][j] = Complex64::new(-kin, -cross * avg);
            }
        }
    }
    HamiltonianMatrix {
        grid: grid.clone(),
        diagonal,
        forward,
        backward,
        label,
        time: t,
        constants: *c,
    }
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// `H psi` on raw node values.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_into(psi, &mut out);
        out
    }

    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        assert_eq!(psi.len(), n, "vector length does not match the operator");
        let row = |j: usize| {
            let mut acc = self.diagonal[j] * psi[j];
            for ax in 0..self.forward.len() {
                let s = self.grid.stride(ax);
                let c = self.grid.coords(j)[ax];
                if c + 1 < self.grid.axis(ax).points {
                    acc += self.forward[ax][j] * psi[j + s];
                }
                if c > 0 {
                    acc += self.backward[ax][j] * psi[j - s];
                }
            }
            acc
        };
        if n >= PARALLEL_MIN {
            out.par_iter_mut().enumerate().for_each(|(j, o)| *o = row(j));
        } else {
            for (j, o) in out.iter_mut().enumerate() {
                *o = row(j);
            }
        }
    }

    pub fn apply_wave(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        if psi.grid != self.grid {
            return Err(GaugeLabError::GridMismatch(
                "wavefunction and Hamiltonian live on different grids".into(),
            ));
        }
        Ok(psi.with_values(self.apply(&psi.values)))
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = self.diagonal.iter().map(|d| d.im.abs()).fold(0.0, f64::max);
        for ax in 0..self.forward.len() {
            let s = self.grid.stride(ax);
            for j in 0..self.dim() {
                if self.grid.has_forward(j, ax) {
                    let d = (self.forward[ax][j] - self.backward[ax][j + s].conj()).norm();
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    /// `D H D^dagger - e (d chi/dt) I` with `D = diag exp(i e chi / hbar)`,
    /// evaluated at the matrix's own time.
    pub fn phase_conjugated(&self, chi: &GaugeFunction) -> HamiltonianMatrix {
        let k = self.constants.phase_coupling();
        let e = self.constants.charge;
        let t = self.time;
        let positions = self.grid.positions();
        let phase: Vec<f64> = positions.iter().map(|r| k * chi.value(r, t)).collect();
        let mut out = self.clone();
        for (j, r) in positions.iter().enumerate() {
            out.diagonal[j] -= e * chi.rate(r, t);
        }
        for ax in 0..self.forward.len() {
            let s = self.grid.stride(ax);
            for j in 0..self.dim() {
                if self.grid.has_forward(j, ax) {
                    out.forward[ax][j] *= Complex64::from_polar(1.0, phase[j] - phase[j + s]);
                }
                if self.grid.has_backward(j, ax) {
                    out.backward[ax][j] *= Complex64::from_polar(1.0, phase[j] - phase[j - s]);
                }
            }
        }
        out.label = format!("{}~{}", self.label, chi.name());
        out
    }

    /// `H + shift I`.
    pub fn shifted(&self, shift: f64) -> HamiltonianMatrix {
        let mut out = self.clone();
        for d in &mut out.diagonal {
            *d += shift;
        }
        out
    }

    /// Lower bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_lower_bound(&self) -> f64 {
        (0..self.dim())
            .map(|j| {
                let radius: f64 = (0..self.forward.len())
                    .map(|ax| self.forward[ax][j].norm() + self.backward[ax][j].norm())
                    .sum();
                self.diagonal[j].re - radius
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_upper_bound(&self) -> f64 {
        (0..self.dim())
            .map(|j| {
                let radius: f64 = (0..self.forward.len())
                    .map(|ax| self.forward[ax][j].norm() + self.backward[ax][j].norm())
                    .sum();
                self.diagonal[j].re + radius
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Dense copy; for tests and small grids.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = self.diagonal[j];
            for ax in 0..self.forward.len() {
                let s = self.grid.stride(ax);
                if self.grid.has_forward(j, ax) {
                    m[(j, j + s)] = self.forward[ax][j];
                }
                if self.grid.has_backward(j, ax) {
                    m[(j, j - s)] = self.backward[ax][j];
                }
            }
        }
        m
    }
}

/// `-i hbar d/dx_a - e A_a` by central differences at node `j`; zero beyond
/// the walls.
pub(crate) fn kinetic_momentum_component(
    grid: &GridSpec,
    vector: &[Vec3],
    psi: &[Complex64],
    ax: usize,
    c: &PhysicalConstants,
) -> Vec<Complex64> {
    let h = grid.spacing(ax);
    let s = grid.stride(ax);
    let zero = Complex64::new(0.0, 0.0);
    (0..psi.len())
        .map(|j| {
            let up = if grid.has_forward(j, ax) { psi[j + s] } else { zero };
            let down = if grid.has_backward(j, ax) { psi[j - s] } else { zero };
            -I * c.hbar * (up - down) / (2.0 * h) - c.charge * vector[j][ax] * psi[j]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emfields::DomainBox;

    #[test]
    fn free_hamiltonian_is_scaled_laplacian() {
        let g = GridSpec::line(0.0, 1.7, 16).unwrap();
        let c = PhysicalConstants::default();
        let h = build_hamiltonian(&PotentialSet::zero(DomainBox::everywhere()), &GaugeFunction::zero(), &g, 0.0, &c).unwrap();
        let dx = g.spacing(0);
        let m = h.to_dense();
        for j in 0..16 {
            assert!((m[(j, j)].re - 1.0 / (dx * dx)).abs() < 1e-12);
            if j + 1 < 16 {
                assert!((m[(j, j + 1)].re + 0.5 / (dx * dx)).abs() < 1e-12);
                assert_eq!(m[(j, j + 1)].im, 0.0);
            }
        }
        assert!(m[(0, 2)].norm() == 0.0);
    }

    #[test]
    fn magnetic_hamiltonian_is_hermitian() {
        let g = GridSpec::square(-3.0, 3.0, 20).unwrap();
        let c = PhysicalConstants { charge: -1.3, ..Default::default() };
        let p = PotentialSet::symmetric_gauge(Vec3::new(0.0, 0.0, 1.0));
        let chi = GaugeFunction::gaussian_bump("b", 0.7, 1.0, Vec3::new(0.3, -0.2, 0.0));
        let h = build_hamiltonian(&p, &chi, &g, 0.4, &c).unwrap();
        assert!(h.hermiticity_residual() < 1e-12);
        let d = h.to_dense();
        assert!((&d - d.adjoint()).camax() < 1e-12);
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let g = GridSpec::square(-2.0, 2.0, 17).unwrap();
        let c = PhysicalConstants::default();
        let p = PotentialSet::symmetric_gauge(Vec3::new(0.0, 0.0, 0.8));
        let h = build_hamiltonian(&p, &GaugeFunction::linear("l", Vec3::new(0.2, 0.1, 0.0)), &g, 0.0, &c).unwrap();
        let psi = Wavefunction::gaussian(&g, Vec3::zeros(), 0.6, Vec3::new(0.5, 0.0, 0.0));
        let sparse = h.apply(&psi.values);
        let dense = h.to_dense() * nalgebra::DVector::from_vec(psi.values.clone());
        let err = sparse.iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn potentials_off_the_grid_are_rejected() {
        let g = GridSpec::line(-3.0, 3.0, 32).unwrap();
        let p = PotentialSet::zero(DomainBox::cube(2.0));
        let r = build_hamiltonian(&p, &GaugeFunction::zero(), &g, 0.0, &PhysicalConstants::default());
        assert!(matches!(r, Err(GaugeLabError::DomainMismatch(_))));
    }
}
