//! Conjugate gradients for Hermitian positive-definite operators.

use num_complex::Complex64;

use super::tridiagonal::{dot, norm};
use crate::error::{GaugeLabError, Result};

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A x = b` for Hermitian positive-definite `A` from the guess `x0`,
/// stopping at `|r| <= tol |b|`.
pub fn conjugate_gradient<F>(
    apply: F,
    b: &[Complex64],
    x0: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let bn = norm(b);
    if bn == 0.0 {
        return Ok(CgOutcome {
            solution: vec![Complex64::new(0.0, 0.0); b.len()],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut x = x0.to_vec();
    let ax = apply(&x);
    let mut r: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for it in 0..=max_iter {
        let rel = rr.sqrt() / bn;
        if rel <= tol {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                relative_residual: rel,
            });
        }
        if it == max_iter {
            return Err(GaugeLabError::LinearSolveFailed {
                iterations: it,
                residual: rel,
            });
        }
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap).re;
        for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
            *xi += pi * alpha;
            *ri -= api * alpha;
        }
        let rr_new = dot(&r, &r).re;
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + *pi * beta;
        }
        rr = rr_new;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_hermitian_system() {
        // A = [[4, 1-i], [1+i, 3]]
        let apply = |x: &[Complex64]| {
            vec![
                x[0] * 4.0 + x[1] * Complex64::new(1.0, -1.0),
                x[0] * Complex64::new(1.0, 1.0) + x[1] * 3.0,
            ]
        };
        let b = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)];
        let out = conjugate_gradient(apply, &b, &[Complex64::new(0.0, 0.0); 2], 1e-14, 10).unwrap();
        let r = apply(&out.solution);
        assert!((r[0] - b[0]).norm() < 1e-13 && (r[1] - b[1]).norm() < 1e-13);
        assert!(out.iterations <= 3);
    }
}
