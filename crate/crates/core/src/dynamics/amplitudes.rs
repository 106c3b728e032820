use nalgebra::DMatrix;
use num_complex::Complex64;

use super::split::{PerturbationSplit, Terms};
use crate::emfields::GaugeFunction;
use crate::error::{GaugeLabError, Result};
use crate::lattice::{raw_inner, Wavefunction};
use crate::spectral::{gauged_basis_state, SpectralBasis};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest tolerated change of `sum |a_n|^2` before propagation aborts.
pub const NORM_DRIFT_LIMIT: f64 = 1e-4;

/// Expansion coefficients `a_n(t)` in a truncated eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    pub time: f64,
    pub coefficients: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn new(time: f64, coefficients: Vec<Complex64>) -> Self {
        Self { time, coefficients }
    }

    /// All weight in state `n`.
    pub fn basis_state(len: usize, n: usize, time: f64) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); len];
        c[n] = Complex64::new(1.0, 0.0);
        Self::new(time, c)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.coefficients.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest `| |a_n| - |b_n| |`.
    pub fn modulus_deviation(&self, other: &AmplitudeVector) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max)
    }
}

/// `<psi_m| V psi_n>` with the basis states dressed by the split's gauge
/// function at time `t`.
pub fn matrix_element(
    split: &PerturbationSplit,
    basis: &SpectralBasis,
    m: usize,
    n: usize,
    t: f64,
) -> Result<Complex64> {
    let bra = dressed_state(basis, m, &split.chi, t)?;
    let ket = dressed_state(basis, n, &split.chi, t)?;
    let v = split.apply_terms(&split.perturbation, &ket, t, Terms::All)?;
    Ok(raw_inner(&bra.values, &v) * basis.grid.cell_volume())
}

/// The full matrix `V_mn(t)` in the split's gauge.
pub fn coupling_matrix(split: &PerturbationSplit, basis: &SpectralBasis, t: f64) -> Result<DMatrix<Complex64>> {
    let dressed: Vec<Wavefunction> = (0..basis.len())
        .map(|n| dressed_state(basis, n, &split.chi, t))
        .collect::<Result<_>>()?;
    matrix_of(split, &dressed, |ket| split.apply_terms(&split.perturbation, ket, t, Terms::All))
}

fn dressed_state(basis: &SpectralBasis, n: usize, chi: &GaugeFunction, t: f64) -> Result<Wavefunction> {
    // psi_n exp(i e chi / hbar) without the dynamical phase
    let mut w = gauged_basis_state(basis, n, chi, t)?;
    let undo = Complex64::from_polar(1.0, basis.energy(n) * t / basis.constants.hbar);
    for v in &mut w.values {
        *v *= undo;
    }
    Ok(w)
}

fn matrix_of<F>(split: &PerturbationSplit, states: &[Wavefunction], apply: F) -> Result<DMatrix<Complex64>>
where
    F: Fn(&Wavefunction) -> Result<Vec<Complex64>>,
{
    let n = states.len();
    let dv = split.grid.cell_volume();
    let mut out = DMatrix::zeros(n, n);
    for (j, ket) in states.iter().enumerate() {
        let v = apply(ket)?;
        for (i, bra) in states.iter().enumerate() {
            out[(i, j)] = raw_inner(&bra.values, &v) * dv;
        }
    }
    Ok(out)
}

/// Source of `V_mn(t)` for the amplitude equations.
enum Couplings {
    /// `V(t) = lambda(t) M1 + lambda(t)^2 M2`.
    Separable {
        linear: DMatrix<Complex64>,
        quadratic: DMatrix<Complex64>,
        profile: crate::emfields::gauge::TimeFn,
    },
    General,
}

/// Step controls for [`propagate_amplitudes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeOptions {
    pub dt: f64,
    /// Record every this many steps; the initial state is always recorded.
    pub output_every: usize,
    pub norm_limit: f64,
}

impl AmplitudeOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            output_every: 1,
            norm_limit: NORM_DRIFT_LIMIT,
        }
    }

    pub fn recording_every(mut self, k: usize) -> Self {
        self.output_every = k.max(1);
        self
    }
}

/// Integrates `i hbar da_m/dt = sum_n a_n V_mn(t) exp(i (E_m - E_n) t / hbar)`
/// with classical RK4 from `a0.time` to `t_end`.
///
/// `V_mn` is evaluated between the undressed eigenstates, so the system depends
/// on the gauge only through the energy differences, which are shift-free.
/// Separable drives are evaluated from two cached matrices.
pub fn propagate_amplitudes(
    basis: &SpectralBasis,
    split: &PerturbationSplit,
    a0: &AmplitudeVector,
    t_end: f64,
    opts: &AmplitudeOptions,
) -> Result<Vec<AmplitudeVector>> {
    if a0.len() != basis.len() {
        return Err(GaugeLabError::InvalidInput(format!(
            "{} amplitudes for a basis of {} states",
            a0.len(),
            basis.len()
        )));
    }
    if !(opts.dt > 0.0) || t_end < a0.time {
        return Err(GaugeLabError::InvalidInput(format!(
            "bad time stepping: dt = {}, span [{}, {}]",
            opts.dt, a0.time, t_end
        )));
    }
    let reference = PerturbationSplit {
        chi: GaugeFunction::zero(),
        ..split.clone()
    };
    let states = &basis.states;
    let couplings = match &reference.drive {
        Some(d) => Couplings::Separable {
            linear: matrix_of(&reference, states, |k| reference.apply_terms(&d.shape, k, 0.0, Terms::Linear))?,
            quadratic: matrix_of(&reference, states, |k| {
                reference.apply_terms(&d.shape, k, 0.0, Terms::Quadratic)
            })?,
            profile: d.profile.clone(),
        },
        None => Couplings::General,
    };
    let mut last: Option<(f64, DMatrix<Complex64>)> = None;
    let mut coupling_at = |t: f64| -> Result<DMatrix<Complex64>> {
        if let Some((tc, m)) = &last {
            if *tc == t {
                return Ok(m.clone());
            }
        }
        let m = match &couplings {
            Couplings::Separable {
                linear,
                quadratic,
                profile,
            } => {
                let l = profile(t);
                linear * Complex64::new(l, 0.0) + quadratic * Complex64::new(l * l, 0.0)
            }
            Couplings::General => matrix_of(&reference, states, |k| {
                reference.apply_terms(&reference.perturbation, k, t, Terms::All)
            })?,
        };
        last = Some((t, m.clone()));
        Ok(m)
    };

    let n = basis.len();
    let hbar = basis.constants.hbar;
    let rhs = |v: &DMatrix<Complex64>, t: f64, a: &[Complex64]| -> Vec<Complex64> {
        let phase: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, basis.energy_difference(k, 0) * t / hbar))
            .collect();
        (0..n)
            .map(|m| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, ak) in a.iter().enumerate() {
                    // exp(i (E_m - E_k) t / hbar)
                    acc += v[(m, k)] * phase[m] * phase[k].conj() * ak;
                }
                -I * acc / hbar
            })
            .collect()
    };

    let steps = ((t_end - a0.time) / opts.dt).round() as usize;
    let dt = if steps == 0 { 0.0 } else { (t_end - a0.time) / steps as f64 };
    let norm0 = a0.norm_squared();
    let mut out = vec![a0.clone()];
    let mut a = a0.coefficients.clone();
    let axpy = |a: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        a.iter().zip(k).map(|(x, y)| x + y * s).collect()
    };
    for step in 0..steps {
        let t = a0.time + step as f64 * dt;
        let v0 = coupling_at(t)?;
        let vh = coupling_at(t + 0.5 * dt)?;
        let k1 = rhs(&v0, t, &a);
        let k2 = rhs(&vh, t + 0.5 * dt, &axpy(&a, &k1, 0.5 * dt));
        let k3 = rhs(&vh, t + 0.5 * dt, &axpy(&a, &k2, 0.5 * dt));
        let t_next = a0.time + (step + 1) as f64 * dt;
        let v1 = coupling_at(t_next)?;
        let k4 = rhs(&v1, t_next, &axpy(&a, &k3, dt));
        for i in 0..n {
            a[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        let drift = (norm - norm0).abs();
        if drift > opts.norm_limit {
            return Err(GaugeLabError::NormDrift {
                drift,
                time: t_next,
                limit: opts.norm_limit,
            });
        }
        if (step + 1) % opts.output_every == 0 || step + 1 == steps {
            out.push(AmplitudeVector::new(t_next, a.clone()));
        }
    }
    Ok(out)
}

/// `a_n = <psi_n exp(i e chi/hbar - i E_n t/hbar) | psi>` at the wavefunction's time.
pub fn project_amplitudes(
    psi: &Wavefunction,
    basis: &SpectralBasis,
    chi: &GaugeFunction,
) -> Result<AmplitudeVector> {
    if psi.grid != basis.grid {
        return Err(GaugeLabError::GridMismatch(
            "projection onto a basis on a different grid".into(),
        ));
    }
    let dv = basis.grid.cell_volume();
    let coefficients = (0..basis.len())
        .map(|n| {
            let b = gauged_basis_state(basis, n, chi, psi.time)?;
            Ok(raw_inner(&b.values, &psi.values) * dv)
        })
        .collect::<Result<_>>()?;
    Ok(AmplitudeVector::new(psi.time, coefficients))
}
