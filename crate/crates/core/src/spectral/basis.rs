use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::emfields::GaugeFunction;
use crate::error::{GaugeLabError, Result};
use crate::lattice::{inner_product, GridSpec, HamiltonianMatrix, Wavefunction};
use crate::linalg::{hermitian_tridiagonal_lowest, lowest_eigenpairs, LanczosOptions};

/// Default number of basis states.
pub const DEFAULT_BASIS_SIZE: usize = 16;
/// Largest accepted `|H psi - E psi|` relative to `|E_N|`.
pub const RESIDUAL_LIMIT: f64 = 1e-8;
/// Largest accepted deviation of the Gram matrix from the identity.
pub const GRAM_LIMIT: f64 = 1e-10;

/// Lowest eigenpairs of a static Hamiltonian.
///
/// Energies are kept as a reference energy plus excitations `E_n - E_0`, so
/// that energy differences do not depend on a constant offset.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub grid: GridSpec,
    reference: f64,
    excitations: Vec<f64>,
    pub states: Vec<Wavefunction>,
    pub residuals: Vec<f64>,
    pub constants: PhysicalConstants,
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.reference + self.excitations[n]
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.energy(n)).collect()
    }

    /// `E_m - E_n`, independent of the reference energy.
    #[inline]
    pub fn energy_difference(&self, m: usize, n: usize) -> f64 {
        self.excitations[m] - self.excitations[n]
    }

    /// Same states with every energy moved by `shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        out.reference += shift;
        out
    }

    /// The first `n` states.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            grid: self.grid.clone(),
            reference: self.reference,
            excitations: self.excitations[..n].to_vec(),
            states: self.states[..n].to_vec(),
            residuals: self.residuals[..n].to_vec(),
            constants: self.constants,
        }
    }

    pub fn state(&self, n: usize) -> Result<&Wavefunction> {
        self.states.get(n).ok_or(GaugeLabError::IndexOutOfRange {
            index: n,
            count: self.len(),
        })
    }
}

/// Rotates `v` so that its largest-magnitude component (first one on ties)
/// is real and positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut big = -1.0;
    for (i, x) in v.iter().enumerate() {
        let m = x.norm_sqr();
        if m > big {
            big = m;
            best = i;
        }
    }
    if big > 0.0 {
        let rot = v[best].conj() / v[best].norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
        v[best] = Complex64::new(v[best].norm(), 0.0);
    }
}

/// Lowest `count` eigenpairs of `h0`.
///
/// 1D matrices are tridiagonal and go through bisection with inverse
/// iteration; 2D ones through shift-invert block Lanczos.
pub fn solve_stationary(h0: &HamiltonianMatrix, count: usize) -> Result<SpectralBasis> {
    let grid = &h0.grid;
    let (values, vectors) = match grid.dim() {
        1 => {
            let diag: Vec<f64> = h0.diagonal.iter().map(|d| d.re).collect();
            let sup = &h0.forward[0][..h0.dim() - 1];
            hermitian_tridiagonal_lowest(&diag, sup, count)?
        }
        _ => {
            let out = lowest_eigenpairs(h0, count, &LanczosOptions::default())?;
            (out.values, out.vectors)
        }
    };
    let scale = grid.cell_volume().sqrt().recip();
    let mut states = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for (e, mut v) in values.iter().zip(vectors) {
        fix_phase(&mut v);
        for x in v.iter_mut() {
            *x *= scale;
        }
        let psi = Wavefunction {
            grid: grid.clone(),
            values: v,
            time: 0.0,
            normalized: true,
        };
        let hpsi = h0.apply(&psi.values);
        let r = hpsi
            .iter()
            .zip(&psi.values)
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            * grid.cell_volume();
        residuals.push(r.sqrt());
        states.push(psi);
    }
    let top = values.last().map_or(1.0, |e| e.abs().max(f64::MIN_POSITIVE));
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > RESIDUAL_LIMIT * top {
        return Err(GaugeLabError::EigenNotConverged {
            iterations: 0,
            worst_residual: worst,
        });
    }
    let reference = values[0];
    Ok(SpectralBasis {
        grid: grid.clone(),
        reference,
        excitations: values.iter().map(|e| e - reference).collect(),
        states,
        residuals,
        constants: h0.constants,
    })
}

/// `psi_n(r) exp[i (e chi(r, t) - E_n t) / hbar]`, stamped at time `t`.
pub fn gauged_basis_state(
    basis: &SpectralBasis,
    n: usize,
    chi: &GaugeFunction,
    t: f64,
) -> Result<Wavefunction> {
    let psi = basis.state(n)?;
    let c = &basis.constants;
    let k = c.phase_coupling();
    let et = basis.energy(n) * t / c.hbar;
    let values = psi
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let r = basis.grid.position(i);
            v * Complex64::from_polar(1.0, k * chi.value(&r, t) - et)
        })
        .collect();
    Ok(Wavefunction {
        grid: basis.grid.clone(),
        values,
        time: t,
        normalized: psi.normalized,
    })
}

/// Largest `|G_mn - delta_mn|` of the Gram matrix.
pub fn check_orthonormality(states: &[Wavefunction]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (m, a) in states.iter().enumerate() {
        for (n, b) in states.iter().enumerate().skip(m) {
            let g = inner_product(a, b)?;
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}
