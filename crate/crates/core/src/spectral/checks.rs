use num_complex::Complex64;

use super::basis::solve_stationary;
use crate::constants::PhysicalConstants;
use crate::emfields::{GaugeFunction, PotentialSet, ScalarTimeField};
use crate::error::{GaugeLabError, Result};
use crate::lattice::{build_hamiltonian, GridSpec, HamiltonianMatrix, Wavefunction};

/// Time-independent potentials on a grid.
#[derive(Debug, Clone)]
pub struct StaticSystem {
    pub potentials: PotentialSet,
    pub grid: GridSpec,
    pub constants: PhysicalConstants,
}

impl StaticSystem {
    pub fn new(potentials: PotentialSet, grid: GridSpec, constants: PhysicalConstants) -> Self {
        Self {
            potentials,
            grid,
            constants,
        }
    }

    /// `H_chi` at time `t`.
    pub fn hamiltonian(&self, chi: &GaugeFunction, t: f64) -> Result<HamiltonianMatrix> {
        build_hamiltonian(&self.potentials, chi, &self.grid, t, &self.constants)
    }

    pub fn with_grid(&self, grid: GridSpec) -> Self {
        Self {
            grid,
            ..self.clone()
        }
    }
}

/// Per-level outcome of [`eigenvalue_shift_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCheck {
    pub bare: Vec<f64>,
    pub gauged: Vec<f64>,
    /// `-e g(t)`.
    pub expected_shift: f64,
    /// `max_n |E_n(chi) - (E_n(0) - e g(t))|`.
    pub residual: f64,
}

/// Compares the lowest `count` levels of the independently assembled
/// `H_chi(t)` with those of `H_0` shifted by `-e g(t)`.
///
/// Both spectra are sorted, so level-by-level comparison is the optimal
/// multiset matching.
pub fn eigenvalue_shift_check(
    sys: &StaticSystem,
    chi: &GaugeFunction,
    t: f64,
    count: usize,
) -> Result<ShiftCheck> {
    let sep = chi
        .separable_form()
        .ok_or_else(|| GaugeLabError::NotSeparable(chi.name().to_string()))?;
    let g = (sep.temporal_rate)(t);
    let expected_shift = -sys.constants.charge * g;
    let bare = solve_stationary(&sys.hamiltonian(&GaugeFunction::zero(), 0.0)?, count)?.energies();
    let gauged = solve_stationary(&sys.hamiltonian(chi, t)?, count)?.energies();
    let residual = bare
        .iter()
        .zip(&gauged)
        .map(|(b, g)| (g - (b + expected_shift)).abs())
        .fold(0.0, f64::max);
    Ok(ShiftCheck {
        bare,
        gauged,
        expected_shift,
        residual,
    })
}

/// Outcome of [`phase_absorption_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionCheck {
    /// Max-norm of `H' psi' - exp(-i m) H psi` over interior nodes.
    pub residual: f64,
    /// Max-norm of `|psi'|^2 - |psi|^2`.
    pub density_deviation: f64,
}

/// Generalized canonical momentum `-i hbar grad + hbar grad m`.
///
/// `H'` is `H_chi` with that momentum, which is `H` in the gauge
/// `chi - (hbar/e) m`; `psi' = exp(-i m) psi`. Returns how far
/// `H' psi'` is from `exp(-i m) H psi`.
pub fn phase_absorption_check(
    sys: &StaticSystem,
    chi: &GaugeFunction,
    m_field: &ScalarTimeField,
    psi: &Wavefunction,
) -> Result<AbsorptionCheck> {
    let t = psi.time;
    let c = &sys.constants;
    let k = c.hbar / c.charge;
    let (g, m) = (chi.clone(), m_field.clone());
    let domain = *chi.domain();
    let primed_chi = GaugeFunction::new(
        format!("{}-m", chi.name()),
        ScalarTimeField::new("chi'", domain, move |r, t| g.value(r, t) - k * m.value(r, t)),
        {
            let (g, m) = (chi.clone(), m_field.clone());
            crate::emfields::VectorTimeField::new("grad chi'", domain, move |r, t| {
                g.gradient(r, t) - m.gradient(r, t) * k
            })
        },
        {
            let (g, m) = (chi.clone(), m_field.clone());
            ScalarTimeField::new("dchi'/dt", domain, move |r, t| {
                g.rate(r, t) - k * m.time_derivative(r, t)
            })
        },
    );
    let h = sys.hamiltonian(chi, t)?;
    let h_primed = sys.hamiltonian(&primed_chi, t)?;
    let grid = &psi.grid;
    let twist: Vec<Complex64> = (0..grid.len())
        .map(|i| Complex64::from_polar(1.0, -m_field.value(&grid.position(i), t)))
        .collect();
    let psi_primed: Vec<Complex64> = psi.values.iter().zip(&twist).map(|(a, b)| a * b).collect();
    let lhs = h_primed.apply(&psi_primed);
    let rhs = h.apply(&psi.values);
    let mut residual: f64 = 0.0;
    let mut density_deviation: f64 = 0.0;
    for i in 0..grid.len() {
        density_deviation = density_deviation.max((psi_primed[i].norm_sqr() - psi.values[i].norm_sqr()).abs());
        if grid.margin(i) >= 1 {
            residual = residual.max((lhs[i] - twist[i] * rhs[i]).norm());
        }
    }
    Ok(AbsorptionCheck {
        residual,
        density_deviation,
    })
}

/// Max-norm of `|a|^2 - |b|^2` node by node.
pub fn density_deviation(a: &Wavefunction, b: &Wavefunction) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
        .fold(0.0, f64::max)
}

/// Probability of state `psi` within distance `radius` of `center`.
pub fn weight_within(psi: &Wavefunction, center: &crate::emfields::Vec3, radius: f64) -> f64 {
    let inside: f64 = psi
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| (psi.grid.position(*i) - center).norm() < radius)
        .map(|(_, v)| v.norm_sqr())
        .sum();
    inside * psi.grid.cell_volume()
}

/// Energies of the basis states carrying at least `min_weight` of their
/// probability within `radius` of `center`.
pub fn interior_energies(
    basis: &super::SpectralBasis,
    center: &crate::emfields::Vec3,
    radius: f64,
    min_weight: f64,
) -> Vec<f64> {
    basis
        .states
        .iter()
        .enumerate()
        .filter(|(_, s)| weight_within(s, center, radius) >= min_weight)
        .map(|(n, _)| basis.energy(n))
        .collect()
}

/// Means of ascending runs of energies split wherever consecutive values
/// differ by more than `gap`.
pub fn cluster_levels(energies: &[f64], gap: f64) -> Vec<f64> {
    let mut sorted = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut run: Vec<f64> = Vec::new();
    for e in sorted {
        if let Some(&last) = run.last() {
            if e - last > gap {
                out.push(run.iter().sum::<f64>() / run.len() as f64);
                run.clear();
            }
        }
        run.push(e);
    }
    if !run.is_empty() {
        out.push(run.iter().sum::<f64>() / run.len() as f64);
    }
    out
}
