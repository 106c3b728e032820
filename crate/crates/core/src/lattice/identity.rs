use num_complex::Complex64;

use super::hamiltonian::{kinetic_momentum_component, sample_fields};
use super::wavefunction::{apply_phase, Wavefunction};
use crate::constants::PhysicalConstants;
use crate::emfields::{GaugeFunction, PotentialSet};
use crate::error::{GaugeLabError, Result};

/// `(p - eA)^s psi` by central differences: for `s = 1` the per-axis
/// components, for `s = 2` the single scalar `sum_a (p_a - e A_a)^2 psi`.
pub fn kinetic_momentum_power(
    psi: &Wavefunction,
    p: &PotentialSet,
    chi: &GaugeFunction,
    s: u32,
    c: &PhysicalConstants,
) -> Result<Vec<Vec<Complex64>>> {
    let grid = &psi.grid;
    let fields = sample_fields(p, chi, grid, psi.time)?;
    let once: Vec<Vec<Complex64>> = (0..grid.dim())
        .map(|ax| kinetic_momentum_component(grid, &fields.vector, &psi.values, ax, c))
        .collect();
    match s {
        1 => Ok(once),
        2 => {
            let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
            for (ax, comp) in once.iter().enumerate() {
                let twice = kinetic_momentum_component(grid, &fields.vector, comp, ax, c);
                for (a, b) in acc.iter_mut().zip(twice) {
                    *a += b;
                }
            }
            Ok(vec![acc])
        }
        _ => Err(GaugeLabError::InvalidInput(format!(
            "momentum power must be 1 or 2, got {s}"
        ))),
    }
}

/// Max-norm of `{p - e(A + grad chi)}^s (psi e^{i e chi/hbar}) - e^{i e chi/hbar} (p - eA)^s psi`
/// over nodes at least `s` points from the walls.
pub fn identity_9_residual(
    psi: &Wavefunction,
    p: &PotentialSet,
    chi: &GaugeFunction,
    s: u32,
    c: &PhysicalConstants,
) -> Result<f64> {
    let dressed = apply_phase(psi, chi, 1.0, c);
    let lhs = kinetic_momentum_power(&dressed, p, chi, s, c)?;
    let bare = kinetic_momentum_power(psi, p, &GaugeFunction::zero(), s, c)?;
    let grid = &psi.grid;
    let mut worst: f64 = 0.0;
    for (l, b) in lhs.iter().zip(&bare) {
        let rhs = apply_phase(&psi.with_values(b.clone()), chi, 1.0, c);
        for j in 0..grid.len() {
            if grid.margin(j) >= s as usize {
                worst = worst.max((l[j] - rhs.values[j]).norm());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emfields::Vec3;
    use crate::lattice::GridSpec;

    #[test]
    fn zero_gauge_is_exact() {
        let g = GridSpec::line(-6.0, 6.0, 128).unwrap();
        let psi = Wavefunction::gaussian(&g, Vec3::zeros(), 0.7, Vec3::new(0.4, 0.0, 0.0));
        let p = PotentialSet::uniform_electric(Vec3::new(0.1, 0.0, 0.0));
        let c = PhysicalConstants::default();
        for s in [1, 2] {
            assert!(identity_9_residual(&psi, &p, &GaugeFunction::zero(), s, &c).unwrap() < 1e-12);
        }
        assert!(identity_9_residual(&psi, &p, &GaugeFunction::zero(), 3, &c).is_err());
    }
}
