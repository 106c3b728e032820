use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::emfields::gauge::TimeFn;
use crate::emfields::{GaugeFunction, PotentialSet};
use crate::error::{GaugeLabError, Result};
use crate::lattice::{build_hamiltonian, HamiltonianMatrix, Wavefunction};
use crate::linalg::{cg::conjugate_gradient, TridiagonalLu};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How the Hamiltonian in a non-trivial gauge is formed at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeMode {
    /// `D H D^dagger - e d chi/dt` from the reference-gauge matrix, exactly
    /// covariant up to rounding.
    PhaseUpdated,
    /// Reassembled from `A + grad chi` and `phi - d chi/dt`; covariant only
    /// up to the discretization error.
    Rebuilt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub dt: f64,
    pub output_every: usize,
    pub mode: GaugeMode,
    /// Relative residual for the 2D inner solves.
    pub solve_tolerance: f64,
    pub max_solve_iterations: usize,
}

impl PropagationOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            output_every: 1,
            mode: GaugeMode::PhaseUpdated,
            solve_tolerance: 1e-12,
            max_solve_iterations: 5000,
        }
    }

    pub fn recording_every(mut self, k: usize) -> Self {
        self.output_every = k.max(1);
        self
    }

    pub fn with_mode(mut self, mode: GaugeMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Clone)]
pub struct WaveTrajectory {
    pub states: Vec<Wavefunction>,
    /// Largest `| |psi(t)| - |psi(0)| |` over all steps.
    pub max_norm_drift: f64,
    pub max_solve_iterations: usize,
}

/// Crank-Nicolson from `psi0.time` to `t_end` under the potentials `p` in the
/// gauge `chi`, with the Hamiltonian taken at each step midpoint.
///
/// For separable `chi = f(r) + g(t)` the uniform term `-e dg/dt` is integrated
/// exactly as a phase `exp(i e [g(t + dt) - g(t)] / hbar)`.
pub fn propagate_wavefunction(
    p: &PotentialSet,
    chi: &GaugeFunction,
    psi0: &Wavefunction,
    t_end: f64,
    opts: &PropagationOptions,
    c: &PhysicalConstants,
) -> Result<WaveTrajectory> {
    if !(opts.dt > 0.0) || t_end < psi0.time {
        return Err(GaugeLabError::InvalidInput(format!(
            "bad time stepping: dt = {}, span [{}, {}]",
            opts.dt, psi0.time, t_end
        )));
    }
    let (spatial, temporal): (GaugeFunction, Option<TimeFn>) = match chi.separable_form() {
        Some(s) => (
            GaugeFunction::static_spatial(chi.name(), s.spatial.clone()),
            Some(s.temporal.clone()),
        ),
        None => (chi.clone(), None),
    };
    let reference = GaugeFunction::zero();
    let grid = psi0.grid.clone();
    let hamiltonian_at = |t: f64| -> Result<HamiltonianMatrix> {
        match opts.mode {
            GaugeMode::Rebuilt => build_hamiltonian(p, &spatial, &grid, t, c),
            GaugeMode::PhaseUpdated => Ok(build_hamiltonian(p, &reference, &grid, t, c)?.phase_conjugated(&spatial)),
        }
    };

    let steps = ((t_end - psi0.time) / opts.dt).round() as usize;
    let dt = if steps == 0 { 0.0 } else { (t_end - psi0.time) / steps as f64 };
    let tau = dt / (2.0 * c.hbar);
    let k = c.phase_coupling();
    let norm0 = psi0.norm();
    let mut psi = psi0.values.clone();
    let mut out = vec![psi0.clone()];
    let mut max_drift: f64 = 0.0;
    let mut max_iters = 0;
    for step in 0..steps {
        let t = psi0.time + step as f64 * dt;
        let t_next = psi0.time + (step + 1) as f64 * dt;
        let h = hamiltonian_at(t + 0.5 * dt)?;
        let (next, iters) = cayley_step(&h, &psi, tau, opts)?;
        psi = next;
        max_iters = max_iters.max(iters);
        if let Some(g) = &temporal {
            let w = Complex64::from_polar(1.0, k * (g(t_next) - g(t)));
            for v in &mut psi {
                *v *= w;
            }
        }
        let state = Wavefunction {
            grid: grid.clone(),
            values: psi.clone(),
            time: t_next,
            normalized: psi0.normalized,
        };
        max_drift = max_drift.max((state.norm() - norm0).abs());
        if (step + 1) % opts.output_every == 0 || step + 1 == steps {
            out.push(state);
        }
    }
    Ok(WaveTrajectory {
        states: out,
        max_norm_drift: max_drift,
        max_solve_iterations: max_iters,
    })
}

/// `(I + i tau H)^{-1} (I - i tau H) psi`.
fn cayley_step(
    h: &HamiltonianMatrix,
    psi: &[Complex64],
    tau: f64,
    opts: &PropagationOptions,
) -> Result<(Vec<Complex64>, usize)> {
    let minus = |v: &[Complex64]| -> Vec<Complex64> {
        let hv = h.apply(v);
        v.iter().zip(&hv).map(|(a, b)| a - I * tau * b).collect()
    };
    let b = minus(psi);
    if h.grid.dim() == 1 {
        let n = h.dim();
        let diag: Vec<Complex64> = h.diagonal.iter().map(|d| 1.0 + I * tau * d).collect();
        let sup: Vec<Complex64> = (0..n - 1).map(|j| I * tau * h.forward[0][j]).collect();
        let sub: Vec<Complex64> = (0..n - 1).map(|j| I * tau * h.backward[0][j + 1]).collect();
        return Ok((TridiagonalLu::factor(&sub, &diag, &sup).solve(&b), 0));
    }
    // normal equations (I + tau^2 H^2) x = (I - i tau H) b
    let rhs = minus(&b);
    let normal = |v: &[Complex64]| -> Vec<Complex64> {
        let hv = h.apply(v);
        let hhv = h.apply(&hv);
        v.iter().zip(&hhv).map(|(a, b)| a + b * (tau * tau)).collect()
    };
    let cg = conjugate_gradient(normal, &rhs, psi, opts.solve_tolerance, opts.max_solve_iterations)?;
    Ok((cg.solution, cg.iterations))
}
