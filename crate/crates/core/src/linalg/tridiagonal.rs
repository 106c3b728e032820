//! Hermitian tridiagonal eigenproblems (bisection plus inverse iteration)
//! and pivoted tridiagonal solves.

use num_complex::Complex64;

use crate::error::{GaugeLabError, Result};

/// LU factorization with partial pivoting of a general complex tridiagonal
/// matrix. Row swaps create a second superdiagonal.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    /// Multipliers `l[j]` eliminating row `j + 1`.
    lower: Vec<Complex64>,
    diag: Vec<Complex64>,
    up1: Vec<Complex64>,
    up2: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// `sub[j] = A(j+1, j)`, `diag[j] = A(j, j)`, `sup[j] = A(j, j+1)`.
    pub fn factor(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64]) -> Self {
        let n = diag.len();
        let zero = Complex64::new(0.0, 0.0);
        let scale = diag.iter().map(|d| d.norm()).fold(0.0, f64::max).max(1e-300);
        let tiny = f64::EPSILON * scale;
        let mut d = diag.to_vec();
        let mut u1: Vec<Complex64> = sup.to_vec();
        u1.push(zero);
        let mut u2 = vec![zero; n];
        let mut lower = vec![zero; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        // row j currently holds (d[j], u1[j], u2[j]) in columns j, j+1, j+2
        let mut below = sub.to_vec();
        for j in 0..n.saturating_sub(1) {
            // next row: (below[j], d[j+1], u1[j+1]) in columns j, j+1, j+2
            if below[j].norm() > d[j].norm() {
                swapped[j] = true;
                let (a0, a1, a2) = (d[j], u1[j], u2[j]);
                d[j] = below[j];
                u1[j] = d[j + 1];
                u2[j] = if j + 1 < n - 1 { u1[j + 1] } else { zero };
                below[j] = a0;
                d[j + 1] = a1;
                if j + 1 < n - 1 {
                    u1[j + 1] = a2;
                }
            }
            if d[j].norm() < tiny {
                d[j] = Complex64::new(tiny, 0.0);
            }
            let l = below[j] / d[j];
            lower[j] = l;
            d[j + 1] -= l * u1[j];
            if j + 1 < n - 1 {
                u1[j + 1] -= l * u2[j];
            }
        }
        if n > 0 && d[n - 1].norm() < tiny {
            d[n - 1] = Complex64::new(tiny, 0.0);
        }
        Self {
            lower,
            diag: d,
            up1: u1,
            up2: u2,
            swapped,
        }
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.diag.len();
        let mut x = rhs.to_vec();
        for j in 0..n.saturating_sub(1) {
            if self.swapped[j] {
                x.swap(j, j + 1);
            }
            let l = self.lower[j];
            let xj = x[j];
            x[j + 1] -= l * xj;
        }
        for j in (0..n).rev() {
            let mut v = x[j];
            if j + 1 < n {
                v -= self.up1[j] * x[j + 1];
            }
            if j + 2 < n {
                v -= self.up2[j] * x[j + 2];
            }
            x[j] = v / self.diag[j];
        }
        x
    }
}

/// Number of eigenvalues of the real symmetric tridiagonal `(d, b)` below `x`.
fn sturm_count(d: &[f64], b2: &[f64], x: f64, tiny: f64) -> usize {
    let mut count = 0;
    let mut q = 0.0;
    for j in 0..d.len() {
        q = if j == 0 { d[0] - x } else { d[j] - x - b2[j - 1] / q };
        // an exact zero pivot counts as negative
        if q.abs() < tiny {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` eigenpairs of the Hermitian tridiagonal matrix with real
/// diagonal `diag` and superdiagonal `sup[j] = H(j, j+1)`.
///
/// Eigenvectors are unit-norm (Euclidean) and mutually orthogonalized.
pub fn hermitian_tridiagonal_lowest(
    diag: &[f64],
    sup: &[Complex64],
    count: usize,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = diag.len();
    if count == 0 || count > n || sup.len() + 1 != n {
        return Err(GaugeLabError::InvalidInput(format!(
            "cannot take {count} eigenpairs of a {n}-point tridiagonal matrix"
        )));
    }
    // unitary diagonal similarity making the off-diagonal real and non-negative
    let mut phase = vec![Complex64::new(1.0, 0.0); n];
    let b: Vec<f64> = sup.iter().map(|s| s.norm()).collect();
    for j in 0..n - 1 {
        phase[j + 1] = if b[j] > 0.0 {
            phase[j] * sup[j].conj() / b[j]
        } else {
            phase[j]
        };
    }
    let b2: Vec<f64> = b.iter().map(|v| v * v).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..n {
        let r = if j > 0 { b[j - 1] } else { 0.0 } + if j + 1 < n { b[j] } else { 0.0 };
        lo = lo.min(diag[j] - r);
        hi = hi.max(diag[j] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(1e-300);
    let tiny = f64::MIN_POSITIVE.sqrt() * scale;
    let mut values = Vec::with_capacity(count);
    for k in 0..count {
        let (mut a, mut z) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + z);
            if mid <= a || mid >= z {
                break;
            }
            if sturm_count(diag, &b2, mid, tiny) > k {
                z = mid;
            } else {
                a = mid;
            }
        }
        values.push(0.5 * (a + z));
    }

    let sub_c: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    for (k, &lambda) in values.iter().enumerate() {
        // a small offset keeps the factorization finite without hurting convergence
        let shift = lambda - 4.0 * f64::EPSILON * scale;
        let dg: Vec<Complex64> = diag.iter().map(|&d| Complex64::new(d - shift, 0.0)).collect();
        let lu = TridiagonalLu::factor(&sub_c, &dg, &sub_c);
        let mut y: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 + 0.37 * ((j * (k + 3)) as f64).sin(), 0.0))
            .collect();
        for _ in 0..4 {
            y = lu.solve(&y);
            for prev in &vectors {
                let c = dot(prev, &y);
                for (yi, pi) in y.iter_mut().zip(prev) {
                    *yi -= c * pi;
                }
            }
            normalize(&mut y);
        }
        vectors.push(y);
    }
    // back to the original basis: x = P y (P unitary keeps orthonormality)
    let vectors = vectors
        .into_iter()
        .map(|y| y.iter().zip(&phase).map(|(v, p)| v * p).collect())
        .collect();
    Ok((values, vectors))
}

/// `sum conj(a) b`.
#[inline]
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

#[inline]
pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Rescales to unit Euclidean norm; returns the old norm.
pub fn normalize(a: &mut [Complex64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        let inv = 1.0 / n;
        for v in a.iter_mut() {
            *v *= inv;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pivoted_solve_matches_dense() {
        let n = 9;
        let sub: Vec<Complex64> = (0..n - 1).map(|j| c(2.0 + j as f64, 0.5)).collect();
        let dg: Vec<Complex64> = (0..n).map(|j| c(0.1 * j as f64, 1.0)).collect();
        let sup: Vec<Complex64> = (0..n - 1).map(|j| c(-1.0, 0.3 * j as f64)).collect();
        let rhs: Vec<Complex64> = (0..n).map(|j| c(j as f64, -1.0)).collect();
        let x = TridiagonalLu::factor(&sub, &dg, &sup).solve(&rhs);
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            a[(j, j)] = dg[j];
            if j + 1 < n {
                a[(j + 1, j)] = sub[j];
                a[(j, j + 1)] = sup[j];
            }
        }
        let r = a * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(rhs);
        assert!(r.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn free_laplacian_has_closed_form_spectrum() {
        let n = 64;
        let diag = vec![2.0; n];
        let sup = vec![c(-1.0, 0.0); n - 1];
        let (vals, vecs) = hermitian_tridiagonal_lowest(&diag, &sup, 5).unwrap();
        for k in 0..5 {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((vals[k] - want).abs() < 1e-14);
            let x = &vecs[k];
            for j in 1..n - 1 {
                let hx = x[j] * 2.0 - x[j - 1] - x[j + 1];
                assert!((hx - x[j] * vals[k]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn eigenpairs_match_dense_solver() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|j| ((j as f64) * 0.3).sin() * 2.0).collect();
        let sup: Vec<Complex64> = (0..n - 1).map(|j| Complex64::from_polar(1.0 + 0.1 * j as f64, 0.7 * j as f64)).collect();
        let (vals, vecs) = hermitian_tridiagonal_lowest(&diag, &sup, 6).unwrap();
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            a[(j, j)] = c(diag[j], 0.0);
            if j + 1 < n {
                a[(j, j + 1)] = sup[j];
                a[(j + 1, j)] = sup[j].conj();
            }
        }
        let mut dense: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        for k in 0..6 {
            assert!((vals[k] - dense[k]).abs() < 1e-12, "{} vs {}", vals[k], dense[k]);
            let x = nalgebra::DVector::from_vec(vecs[k].clone());
            let r = &a * &x - &x * c(vals[k], 0.0);
            assert!(r.norm() < 1e-11);
            for l in 0..k {
                assert!(dot(&vecs[l], &vecs[k]).norm() < 1e-12);
            }
        }
    }
}
