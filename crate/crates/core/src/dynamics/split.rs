use std::fmt;

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::emfields::gauge::TimeFn;
use crate::emfields::{GaugeFunction, PotentialSet, Vec3};
use crate::error::{GaugeLabError, Result};
use crate::lattice::{build_hamiltonian, sample_fields, GridSpec, HamiltonianMatrix, Wavefunction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Perturbing potentials `P1(r, t) = lambda(t) S(r)` with a static shape `S`.
#[derive(Clone)]
pub struct SeparableDrive {
    /// Potentials `S`, evaluated at `t = 0`.
    pub shape: PotentialSet,
    pub profile: TimeFn,
}

impl fmt::Debug for SeparableDrive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableDrive")
            .field("shape", &self.shape.label)
            .finish_non_exhaustive()
    }
}

impl SeparableDrive {
    /// The drive as time-dependent potentials.
    pub fn potentials(&self) -> PotentialSet {
        let (s, l) = (self.shape.clone(), self.profile.clone());
        let domain = s.domain();
        let (sv, lv) = (s.clone(), l.clone());
        let vector = crate::emfields::VectorTimeField::new("lambda*A1", domain, move |r, t| {
            sv.vector.value(r, 0.0) * lv(t)
        });
        let (ss, ls) = (s.clone(), l);
        let scalar = crate::emfields::ScalarTimeField::new("lambda*phi1", domain, move |r, t| {
            ls(t) * ss.scalar.value(r, 0.0)
        });
        PotentialSet::new(vector, scalar, format!("drive({})", s.label))
    }
}

/// `H_chi = H0_chi + V_chi` with
/// `V_chi = -(e/m) A1 . {p - e(A0 + grad chi)} + (e^2/2m) |A1|^2 + (i e hbar / 2m) div A1 + e phi1`.
#[derive(Debug, Clone)]
pub struct PerturbationSplit {
    pub unperturbed: PotentialSet,
    pub perturbation: PotentialSet,
    pub chi: GaugeFunction,
    pub grid: GridSpec,
    pub constants: PhysicalConstants,
    /// Present when the perturbation factorizes in time.
    pub drive: Option<SeparableDrive>,
}

pub fn split_hamiltonian(
    p0: &PotentialSet,
    p1: &PotentialSet,
    chi: &GaugeFunction,
    grid: &GridSpec,
    c: &PhysicalConstants,
) -> PerturbationSplit {
    PerturbationSplit {
        unperturbed: p0.clone(),
        perturbation: p1.clone(),
        chi: chi.clone(),
        grid: grid.clone(),
        constants: *c,
        drive: None,
    }
}

/// Split with a time-factorized drive; matrix elements can then be cached.
pub fn split_separable(
    p0: &PotentialSet,
    drive: &SeparableDrive,
    chi: &GaugeFunction,
    grid: &GridSpec,
    c: &PhysicalConstants,
) -> PerturbationSplit {
    PerturbationSplit {
        drive: Some(drive.clone()),
        ..split_hamiltonian(p0, &drive.potentials(), chi, grid, c)
    }
}

/// Which terms of `V` to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Terms {
    All,
    /// Terms linear in the perturbing potentials.
    Linear,
    /// The `(e^2/2m) |A1|^2` term.
    Quadratic,
}

impl PerturbationSplit {
    /// `H0_chi` at time `t`.
    pub fn unperturbed_hamiltonian(&self, t: f64) -> Result<HamiltonianMatrix> {
        build_hamiltonian(&self.unperturbed, &self.chi, &self.grid, t, &self.constants)
    }

    /// `V_chi psi` at the wavefunction's time.
    pub fn apply_perturbation(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        let vals = self.apply_terms(&self.perturbation, psi, psi.time, Terms::All)?;
        Ok(psi.with_values(vals))
    }

    /// `(H0_chi + V_chi) psi`.
    pub fn apply_total(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        let h0 = self.unperturbed_hamiltonian(psi.time)?.apply(&psi.values);
        let v = self.apply_terms(&self.perturbation, psi, psi.time, Terms::All)?;
        Ok(psi.with_values(h0.iter().zip(&v).map(|(a, b)| a + b).collect()))
    }

    pub(crate) fn apply_terms(
        &self,
        p1: &PotentialSet,
        psi: &Wavefunction,
        t: f64,
        terms: Terms,
    ) -> Result<Vec<Complex64>> {
        if psi.grid != self.grid {
            return Err(GaugeLabError::GridMismatch(
                "wavefunction and perturbation split live on different grids".into(),
            ));
        }
        let grid = &self.grid;
        let c = &self.constants;
        let (e, m, hbar) = (c.charge, c.mass, c.hbar);
        // A0 + grad chi at the nodes
        let background = sample_fields(&self.unperturbed, &self.chi, grid, t)?;
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; grid.len()];
        for (j, o) in out.iter_mut().enumerate() {
            let r = grid.position(j);
            let a1 = p1.vector.value(&r, t);
            let mut acc = zero;
            if terms != Terms::Quadratic {
                for ax in 0..grid.dim() {
                    if a1[ax] == 0.0 {
                        continue;
                    }
                    let s = grid.stride(ax);
                    let h = grid.spacing(ax);
                    let up = if grid.has_forward(j, ax) { psi.values[j + s] } else { zero };
                    let down = if grid.has_backward(j, ax) { psi.values[j - s] } else { zero };
                    let pi = -I * hbar * (up - down) / (2.0 * h) - e * background.vector[j][ax] * psi.values[j];
                    acc -= e / m * a1[ax] * pi;
                }
                let div = planar_divergence(p1, &r, t, grid.dim());
                acc += I * (e * hbar / (2.0 * m)) * div * psi.values[j];
                acc += e * p1.scalar.value(&r, t) * psi.values[j];
            }
            if terms != Terms::Linear {
                let a2: f64 = (0..grid.dim()).map(|ax| a1[ax] * a1[ax]).sum();
                acc += e * e / (2.0 * m) * a2 * psi.values[j];
            }
            *o = acc;
        }
        Ok(out)
    }
}

/// Divergence restricted to the grid axes.
fn planar_divergence(p: &PotentialSet, r: &Vec3, t: f64, dim: usize) -> f64 {
    if dim == 3 {
        return p.vector.divergence(r, t);
    }
    let j = p.vector.jacobian(r, t);
    (0..dim).map(|a| j[(a, a)]).sum()
}
