use num_complex::Complex64;

use super::grid::GridSpec;
use crate::constants::PhysicalConstants;
use crate::emfields::{GaugeFunction, Vec3};
use crate::error::{GaugeLabError, Result};

/// Tolerance on `|norm - 1|` for a wavefunction flagged normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Complex amplitudes on the nodes of a grid at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub time: f64,
    pub normalized: bool,
}

impl Wavefunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GaugeLabError::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(GaugeLabError::InvalidInput(format!(
                "non-finite amplitude at node {i}"
            )));
        }
        Ok(Self {
            grid,
            values,
            time,
            normalized: false,
        })
    }

    pub fn zeros(grid: &GridSpec, time: f64) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
            time,
            normalized: false,
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn<F>(grid: &GridSpec, time: f64, f: F) -> Self
    where
        F: Fn(&Vec3) -> Complex64,
    {
        Self {
            values: grid.positions().iter().map(f).collect(),
            grid: grid.clone(),
            time,
            normalized: false,
        }
    }

    /// Normalized Gaussian packet `exp(-|r - c|^2 / (4 w^2) + i k . r)`.
    pub fn gaussian(grid: &GridSpec, center: Vec3, width: f64, momentum: Vec3) -> Self {
        Self::from_fn(grid, 0.0, |r| {
            let d = r - center;
            Complex64::from_polar((-d.norm_squared() / (4.0 * width * width)).exp(), momentum.dot(r))
        })
        .normalized_copy()
    }

    /// `sum |psi|^2 h^dim`.
    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Copy rescaled to unit norm; a zero state is returned unchanged.
    pub fn normalized_copy(&self) -> Self {
        let n = self.norm();
        let mut out = self.clone();
        if n > 0.0 {
            let inv = 1.0 / n;
            for v in &mut out.values {
                *v *= inv;
            }
            out.normalized = true;
        }
        out
    }

    /// `|psi|^2` per node.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            grid: self.grid.clone(),
            values,
            time: self.time,
            normalized: false,
        }
    }

    pub fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Checks the flagged-normalized invariant.
    pub fn check_normalization(&self) -> Result<()> {
        if self.normalized {
            let drift = (self.norm() - 1.0).abs();
            if drift > NORMALIZATION_TOLERANCE {
                return Err(GaugeLabError::InvalidInput(format!(
                    "wavefunction flagged normalized has norm drift {drift:e}"
                )));
            }
        }
        Ok(())
    }
}

/// `<a|b> = sum conj(a) b h^dim`.
pub fn inner_product(a: &Wavefunction, b: &Wavefunction) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(GaugeLabError::GridMismatch(
            "inner product of wavefunctions on different grids".into(),
        ));
    }
    if a.time != b.time {
        return Err(GaugeLabError::GridMismatch(format!(
            "inner product across time stamps {} and {}",
            a.time, b.time
        )));
    }
    Ok(raw_inner(&a.values, &b.values) * a.grid.cell_volume())
}

/// Unweighted `sum conj(a) b`, summed in index order.
#[inline]
pub(crate) fn raw_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Multiplies by `exp(sign i e chi(r, t) / hbar)` at the wavefunction's time.
pub fn apply_phase(
    psi: &Wavefunction,
    chi: &GaugeFunction,
    sign: f64,
    c: &PhysicalConstants,
) -> Wavefunction {
    let k = sign * c.phase_coupling();
    let values = psi
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v * Complex64::from_polar(1.0, k * chi.value(&psi.grid.position(i), psi.time)))
        .collect();
    Wavefunction {
        grid: psi.grid.clone(),
        values,
        time: psi.time,
        normalized: psi.normalized,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::line(-8.0, 8.0, 256).unwrap()
    }

    #[test]
    fn gaussian_is_normalized() {
        let psi = Wavefunction::gaussian(&grid(), Vec3::new(0.5, 0.0, 0.0), 0.8, Vec3::new(1.0, 0.0, 0.0));
        assert!((inner_product(&psi, &psi).unwrap().re - 1.0).abs() < 1e-10);
        assert!(psi.check_normalization().is_ok());
    }

    #[test]
    fn mismatched_grid_or_time_is_rejected() {
        let a = Wavefunction::gaussian(&grid(), Vec3::zeros(), 1.0, Vec3::zeros());
        let b = Wavefunction::gaussian(&grid().with_points(128).unwrap(), Vec3::zeros(), 1.0, Vec3::zeros());
        assert!(inner_product(&a, &b).is_err());
        assert!(inner_product(&a, &a.clone().at_time(1.0)).is_err());
        let z = Wavefunction::zeros(&grid(), 0.0);
        assert_eq!(inner_product(&a, &z).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_round_trip() {
        let c = PhysicalConstants::default();
        let psi = Wavefunction::gaussian(&grid(), Vec3::zeros(), 1.0, Vec3::new(0.3, 0.0, 0.0));
        let chi = GaugeFunction::gaussian_bump("b", 2.0, 1.5, Vec3::new(0.4, 0.0, 0.0));
        let there = apply_phase(&psi, &chi, 1.0, &c);
        assert!((there.norm() - psi.norm()).abs() < 1e-12);
        let back = apply_phase(&there, &chi, -1.0, &c);
        let err = back
            .values
            .iter()
            .zip(&psi.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert_eq!(apply_phase(&psi, &GaugeFunction::zero(), 1.0, &c), psi);
    }
}
