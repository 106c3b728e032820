//! Cholesky factorization of Hermitian positive-definite band matrices.

use num_complex::Complex64;

use crate::error::{GaugeLabError, Result};

/// `A = L L^dagger` with `L` lower-triangular of bandwidth `b`.
/// `L(j, i)` for `j - b <= i <= j` lives at `band[j * (b + 1) + i + b - j]`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    b: usize,
    band: Vec<Complex64>,
}

impl BandCholesky {
    /// Factors the matrix whose lower band is given by `entry(j, i)` for
    /// `j - b <= i <= j`.
    pub fn factor<F>(n: usize, b: usize, entry: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let w = b + 1;
        let mut band = vec![Complex64::new(0.0, 0.0); n * w];
        for j in 0..n {
            let lo = j.saturating_sub(b);
            for i in lo..=j {
                let klo = lo.max(i.saturating_sub(b));
                // sum_{k in [klo, i)} L(j, k) conj(L(i, k))
                let rj = &band[j * w + klo + b - j..j * w + i + b - j];
                let ri = &band[i * w + klo + b - i..i * w + b];
                let s = rj
                    .iter()
                    .zip(ri)
                    .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj());
                let a = entry(j, i) - s;
                if i == j {
                    if !(a.re > 0.0) || !a.re.is_finite() {
                        return Err(GaugeLabError::InvalidInput(format!(
                            "band matrix is not positive definite (pivot {:e} at row {j})",
                            a.re
                        )));
                    }
                    band[j * w + b] = Complex64::new(a.re.sqrt(), 0.0);
                } else {
                    let lii = band[i * w + b];
                    band[j * w + i + b - j] = a / lii;
                }
            }
        }
        Ok(Self { n, b, band })
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        let mut y = rhs.to_vec();
        for j in 0..n {
            let lo = j.saturating_sub(b);
            let row = &self.band[j * w + lo + b - j..j * w + b];
            let s = row
                .iter()
                .zip(&y[lo..j])
                .fold(Complex64::new(0.0, 0.0), |acc, (l, v)| acc + l * v);
            y[j] = (y[j] - s) / self.band[j * w + b].re;
        }
        for j in (0..n).rev() {
            y[j] /= self.band[j * w + b].re;
            let xj = y[j];
            let lo = j.saturating_sub(b);
            for i in lo..j {
                let l = self.band[j * w + i + b - j];
                y[i] -= l.conj() * xj;
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn solves_hermitian_band_system() {
        let (n, b) = (30, 4);
        let entry = |j: usize, i: usize| -> Complex64 {
            if i == j {
                Complex64::new(6.0 + (j % 3) as f64, 0.0)
            } else if j - i == 1 {
                Complex64::new(-1.0, 0.2 * j as f64 / n as f64)
            } else if j - i == b {
                Complex64::new(-0.5, -0.3)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let chol = BandCholesky::factor(n, b, entry).unwrap();
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            for i in j.saturating_sub(b)..=j {
                a[(j, i)] = entry(j, i);
                a[(i, j)] = entry(j, i).conj();
            }
        }
        let rhs: Vec<Complex64> = (0..n).map(|j| Complex64::new(j as f64, 1.0)).collect();
        let x = chol.solve(&rhs);
        let r = a * DVector::from_vec(x) - DVector::from_vec(rhs);
        assert!(r.camax() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let r = BandCholesky::factor(3, 1, |j, i| {
            Complex64::new(if i == j { -1.0 } else { 0.0 }, 0.0)
        });
        assert!(r.is_err());
    }
}
