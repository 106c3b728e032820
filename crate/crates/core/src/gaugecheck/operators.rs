use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::PhysicalConstants;
use crate::emfields::{GaugeFunction, PotentialSet, ScalarTimeField, Vec3};
use crate::error::{GaugeLabError, Result};
use crate::lattice::{apply_phase, build_hamiltonian, kinetic_momentum_power, GridSpec, Wavefunction};

/// Seed of the standard probe set.
pub const PROBE_SEED: u64 = 0x9a_0b_e5;

/// A linear operator on grid wavefunctions.
pub type GridOperator<'a> = Box<dyn Fn(&Wavefunction) -> Result<Wavefunction> + Send + Sync + 'a>;

/// Three normalized Gaussians with distinct widths and momenta, centered near
/// the middle of the grid and negligible at the walls.
pub fn standard_probes(grid: &GridSpec) -> Vec<Wavefunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let extent: Vec<(f64, f64)> = grid.axes().iter().map(|a| (a.min, a.max)).collect();
    let shortest = extent.iter().map(|(lo, hi)| hi - lo).fold(f64::INFINITY, f64::min);
    (0..3)
        .map(|k| {
            let mut center = Vec3::zeros();
            let mut momentum = Vec3::zeros();
            for (a, (lo, hi)) in extent.iter().enumerate() {
                let mid = 0.5 * (lo + hi);
                center[a] = mid + (hi - lo) * rng.random_range(-0.1..0.1);
                momentum[a] = rng.random_range(-1.5..1.5);
            }
            let width = shortest * (0.035 + 0.005 * k as f64);
            Wavefunction::gaussian(grid, center, width, momentum)
        })
        .collect()
}

/// `(p - e(A + grad chi))_axis`.
pub fn kinetic_momentum_operator<'a>(
    p: &'a PotentialSet,
    chi: &'a GaugeFunction,
    axis: usize,
    c: PhysicalConstants,
) -> GridOperator<'a> {
    Box::new(move |psi: &Wavefunction| {
        if axis >= psi.grid.dim() {
            return Err(GaugeLabError::InvalidInput(format!(
                "axis {axis} on a {}-dimensional grid",
                psi.grid.dim()
            )));
        }
        let mut comps = kinetic_momentum_power(psi, p, chi, 1, &c)?;
        Ok(psi.with_values(comps.swap_remove(axis)))
    })
}

/// `p_axis = -i hbar d/dx_axis`, the same in every gauge.
pub fn canonical_momentum_operator(axis: usize, c: PhysicalConstants) -> GridOperator<'static> {
    Box::new(move |psi: &Wavefunction| {
        let zero = PotentialSet::zero(psi.grid.bounding_box());
        let free = GaugeFunction::zero();
        let op = kinetic_momentum_operator(&zero, &free, axis, c);
        op(psi)
    })
}

/// Multiplication by `scale * field(r, t)`.
pub fn multiplication_operator(field: ScalarTimeField, scale: f64) -> GridOperator<'static> {
    Box::new(move |psi: &Wavefunction| {
        let values = psi
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * (scale * field.value(&psi.grid.position(i), psi.time)))
            .collect();
        Ok(psi.with_values(values))
    })
}

fn grid_norm(values: &[Complex64], grid: &GridSpec) -> f64 {
    (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume()).sqrt()
}

/// `max_probes |V_chi(D psi) - D V_0 psi|` with `D = exp(i e chi / hbar)` and
/// the grid 2-norm.
pub fn operator_invariance_residual(
    op_reference: &GridOperator<'_>,
    op_gauged: &GridOperator<'_>,
    chi: &GaugeFunction,
    probes: &[Wavefunction],
    c: &PhysicalConstants,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for psi in probes {
        let lhs = op_gauged(&apply_phase(psi, chi, 1.0, c))?;
        let rhs = apply_phase(&op_reference(psi)?, chi, 1.0, c);
        let diff: Vec<Complex64> = lhs.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect();
        worst = worst.max(grid_norm(&diff, &psi.grid));
    }
    Ok(worst)
}

/// `max_probes max_nodes |[H_chi - (D H_0 D^dagger - e d chi/dt)] psi|`.
pub fn hamiltonian_transform_residual(
    p: &PotentialSet,
    chi: &GaugeFunction,
    t: f64,
    probes: &[Wavefunction],
    c: &PhysicalConstants,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for psi in probes {
        let gauged = build_hamiltonian(p, chi, &psi.grid, t, c)?;
        let conjugated = build_hamiltonian(p, &GaugeFunction::zero(), &psi.grid, t, c)?.phase_conjugated(chi);
        let a = gauged.apply(&psi.values);
        let b = conjugated.apply(&psi.values);
        worst = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(worst, f64::max);
    }
    Ok(worst)
}

/// Relative error with which `H_chi psi - D H_0 D^dagger psi` reproduces
/// `-e (d chi/dt) psi`.
pub fn rate_term_recovery(
    p: &PotentialSet,
    chi: &GaugeFunction,
    t: f64,
    psi: &Wavefunction,
    c: &PhysicalConstants,
) -> Result<f64> {
    let grid = &psi.grid;
    let gauged = build_hamiltonian(p, chi, grid, t, c)?.apply(&psi.values);
    let reference = build_hamiltonian(p, &GaugeFunction::zero(), grid, t, c)?;
    // phase_conjugated already carries -e chi_t; add it back to isolate D H D^dagger
    let conj = reference.phase_conjugated(chi).apply(&psi.values);
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, ((g, h), v)) in gauged.iter().zip(&conj).zip(&psi.values).enumerate() {
        let rate_term = -c.charge * chi.rate(&grid.position(j), t) * v;
        let recovered = g - (h - rate_term);
        num += (recovered - rate_term).norm_sqr();
        den += rate_term.norm_sqr();
    }
    if den == 0.0 {
        return Err(GaugeLabError::InvalidInput(format!(
            "gauge function `{}` has no time dependence to recover",
            chi.name()
        )));
    }
    Ok((num / den).sqrt())
}
