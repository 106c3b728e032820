//! Lowest eigenpairs of a sparse Hermitian operator by block Lanczos on the
//! shift-inverted operator `(H - sigma)^-1`, with full reorthogonalization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::banded::BandCholesky;
use super::tridiagonal::{dot, norm};
use crate::error::{GaugeLabError, Result};
use crate::lattice::HamiltonianMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub block: usize,
    /// Cap on the Krylov basis size.
    pub max_basis: usize,
    /// Convergence when `|H x - E x| <= tol * max(|E|, 1)` for every wanted pair.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            block: 8,
            max_basis: 640,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOutcome {
    pub values: Vec<f64>,
    /// Unit Euclidean norm.
    pub vectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub basis_size: usize,
    pub shift: f64,
}

/// Factors `H - sigma` with `sigma` under the Gershgorin bound, moving the
/// shift further down if the factorization meets a non-positive pivot.
fn factor_shifted(h: &HamiltonianMatrix) -> Result<(f64, BandCholesky)> {
    let n = h.dim();
    let b = (0..h.grid.dim()).map(|a| h.grid.stride(a)).max().unwrap_or(1);
    let lower = h.gershgorin_lower_bound();
    let mut gap = 1e-3 * lower.abs().max(1.0);
    for _ in 0..20 {
        let sigma = lower - gap;
        let entry = |j: usize, i: usize| -> Complex64 {
            if i == j {
                return h.diagonal[j] - sigma;
            }
            for ax in 0..h.grid.dim() {
                if j - i == h.grid.stride(ax) && h.grid.has_backward(j, ax) {
                    return h.backward[ax][j];
                }
            }
            Complex64::new(0.0, 0.0)
        };
        match BandCholesky::factor(n, b, entry) {
            Ok(f) => return Ok((sigma, f)),
            Err(_) => gap *= 4.0,
        }
    }
    Err(GaugeLabError::InvalidInput(
        "could not factor the shifted Hamiltonian".into(),
    ))
}

/// Orthogonalizes `w` against `basis` twice; returns the accumulated
/// projection coefficients.
fn orthogonalize(basis: &[Vec<Complex64>], w: &mut [Complex64]) -> Vec<Complex64> {
    let mut coeff = vec![Complex64::new(0.0, 0.0); basis.len()];
    for _ in 0..2 {
        let proj: Vec<Complex64> = basis.par_iter().map(|v| dot(v, w)).collect();
        for (v, c) in basis.iter().zip(&proj) {
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= c * vi;
            }
        }
        for (a, c) in coeff.iter_mut().zip(&proj) {
            *a += c;
        }
    }
    coeff
}

pub fn lowest_eigenpairs(
    h: &HamiltonianMatrix,
    count: usize,
    opts: &LanczosOptions,
) -> Result<LanczosOutcome> {
    let n = h.dim();
    if count == 0 || count > n {
        return Err(GaugeLabError::InvalidInput(format!(
            "cannot take {count} eigenpairs of a {n}-point operator"
        )));
    }
    let (sigma, chol) = factor_shifted(h)?;
    let block = opts.block.max(1).min(n);
    let max_basis = opts.max_basis.min(n);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    // projected operator: column j holds the coefficients of M v_j
    let mut proj: Vec<Vec<Complex64>> = Vec::new();
    let mut pending: Vec<Vec<Complex64>> = (0..block)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        })
        .collect();
    let mut steps = 0usize;

    loop {
        // pending vectors are already orthogonal to the basis; only the
        // vectors appended from this same block remain
        let block_start = basis.len();
        for mut w in pending.drain(..) {
            let before = norm(&w);
            orthogonalize(&basis[block_start..], &mut w);
            let beta = norm(&w);
            if beta > 1e-10 * before && basis.len() < max_basis {
                for v in w.iter_mut() {
                    *v /= beta;
                }
                basis.push(w);
            }
        }
        let start = proj.len();
        let exhausted = start == basis.len();
        if !exhausted {
            let images: Vec<Vec<Complex64>> =
                basis[start..].par_iter().map(|v| chol.solve(v)).collect();
            for mut w in images {
                proj.push(orthogonalize(&basis, &mut w));
                pending.push(w);
            }
            steps += 1;
        }

        let m = proj.len();
        if m < count {
            if exhausted {
                return Err(GaugeLabError::EigenNotConverged {
                    iterations: steps,
                    worst_residual: f64::INFINITY,
                });
            }
            continue;
        }
        if !exhausted && m < count + block || (!exhausted && steps % 3 != 0) {
            continue;
        }
        let outcome = rayleigh_ritz(h, &basis, &proj, sigma, count);
        let worst = outcome
            .residuals
            .iter()
            .zip(&outcome.values)
            .map(|(r, e)| r / e.abs().max(1.0))
            .fold(0.0, f64::max);
        if worst <= opts.tol {
            return Ok(outcome);
        }
        if exhausted {
            return Err(GaugeLabError::EigenNotConverged {
                iterations: steps,
                worst_residual: worst,
            });
        }
    }
}

fn rayleigh_ritz(
    h: &HamiltonianMatrix,
    basis: &[Vec<Complex64>],
    proj: &[Vec<Complex64>],
    sigma: f64,
    count: usize,
) -> LanczosOutcome {
    let m = proj.len();
    let mut t = DMatrix::<Complex64>::zeros(m, m);
    // v_i^dagger M v_j is recorded in column j for i <= j; below the
    // diagonal it comes from column i by Hermiticity
    for j in 0..m {
        for i in 0..=j {
            let v = if i == j {
                Complex64::new(proj[j][j].re, 0.0)
            } else {
                proj[j][i]
            };
            t[(i, j)] = v;
            t[(j, i)] = v.conj();
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    // largest theta <-> lowest energy
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let n = basis[0].len();
    let pairs: Vec<(f64, Vec<Complex64>, f64)> = order[..count]
        .par_iter()
        .map(|&k| {
            let y = eig.eigenvectors.column(k);
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            for (i, v) in basis[..m].iter().enumerate() {
                let c = y[i];
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += c * vi;
                }
            }
            let nx = norm(&x);
            for v in x.iter_mut() {
                *v /= nx;
            }
            let hx = h.apply(&x);
            let e = dot(&x, &hx).re;
            let r = hx
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b * e).norm_sqr())
                .sum::<f64>()
                .sqrt();
            (e, x, r)
        })
        .collect();
    let mut pairs = pairs;
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    LanczosOutcome {
        values: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        vectors: pairs.into_iter().map(|p| p.1).collect(),
        basis_size: m,
        shift: sigma,
    }
}
