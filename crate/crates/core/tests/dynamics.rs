use std::sync::Arc;

use gauge_lab::dynamics::*;
use gauge_lab::emfields::{DomainBox, GaugeFunction, PotentialSet, ScalarTimeField, Vec3, VectorTimeField};
use gauge_lab::lattice::{apply_phase, build_hamiltonian, inner_product, GridSpec, Wavefunction};
use gauge_lab::spectral::{solve_stationary, SpectralBasis};
use gauge_lab::{GaugeLabError, PhysicalConstants};
use num_complex::Complex64;

fn oscillator(points: usize, count: usize) -> (PotentialSet, GridSpec, SpectralBasis) {
    let c = PhysicalConstants::default();
    let g = GridSpec::line(-10.0, 10.0, points).unwrap();
    let p = PotentialSet::harmonic_trap(1.0, c.mass, c.charge, 1);
    let h = build_hamiltonian(&p, &GaugeFunction::zero(), &g, 0.0, &c).unwrap();
    (p.clone(), g, solve_stationary(&h, count).unwrap())
}

/// `e phi1 = -e E0 x cos(omega t)`.
fn dipole_drive(e0: f64, omega: f64) -> SeparableDrive {
    let shape = PotentialSet::uniform_electric(Vec3::new(e0, 0.0, 0.0));
    SeparableDrive {
        shape,
        profile: Arc::new(move |t: f64| (omega * t).cos()),
    }
}

#[test]
fn weak_resonant_drive_gives_rabi_flopping() {
    let c = PhysicalConstants::default();
    let (p0, g, basis) = oscillator(256, 2);
    let omega = basis.energy_difference(1, 0);
    let drive = dipole_drive(0.01, omega);
    let split = split_separable(&p0, &drive, &GaugeFunction::zero(), &g, &c);
    let v01 = matrix_element(&split, &basis, 0, 1, 0.0).unwrap();
    let rabi = v01.norm() / c.hbar;
    let t_pi = std::f64::consts::PI / rabi;
    let a0 = AmplitudeVector::basis_state(2, 0, 0.0);
    let run = propagate_amplitudes(&basis, &split, &a0, t_pi, &AmplitudeOptions::new(0.05).recording_every(100)).unwrap();
    for a in &run {
        let want = (0.5 * rabi * a.time).sin().powi(2);
        assert!((a.populations()[1] - want).abs() < 5e-3, "t={} got {}", a.time, a.populations()[1]);
    }
    assert!((run.last().unwrap().populations()[1] - 1.0).abs() < 5e-3);
}

#[test]
fn rk4_is_fourth_order() {
    let c = PhysicalConstants::default();
    let (p0, g, basis) = oscillator(256, 4);
    let drive = dipole_drive(0.3, 0.9);
    let split = split_separable(&p0, &drive, &GaugeFunction::zero(), &g, &c);
    let a0 = AmplitudeVector::basis_state(4, 0, 0.0);
    let end = |dt: f64| {
        propagate_amplitudes(&basis, &split, &a0, 4.0, &AmplitudeOptions::new(dt))
            .unwrap()
            .pop()
            .unwrap()
    };
    let reference = end(0.2 / 16.0);
    let err = |dt: f64| {
        let a = end(dt);
        a.coefficients
            .iter()
            .zip(&reference.coefficients)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(0.2), err(0.1));
    let order = (e1 / e2).log2();
    assert!(order > 3.7 && order < 4.3, "order {order}");
}

#[test]
fn cached_and_direct_couplings_agree() {
    let c = PhysicalConstants::default();
    let (p0, g, basis) = oscillator(128, 4);
    // velocity-gauge drive exercises both the linear and quadratic terms
    let shape = PotentialSet::new(
        VectorTimeField::constant("A1", Vec3::new(0.2, 0.0, 0.0), DomainBox::everywhere()),
        ScalarTimeField::new("phi1", DomainBox::everywhere(), |r, _| 0.1 * r.x * r.x)
            .with_gradient(|r, _| Vec3::new(0.2 * r.x, 0.0, 0.0)),
        "mixed",
    );
    let drive = SeparableDrive {
        shape,
        profile: Arc::new(|t: f64| (1.3 * t).sin()),
    };
    let cached = split_separable(&p0, &drive, &GaugeFunction::zero(), &g, &c);
    let direct = split_hamiltonian(&p0, &drive.potentials(), &GaugeFunction::zero(), &g, &c);
    let a0 = AmplitudeVector::basis_state(4, 1, 0.0);
    let opts = AmplitudeOptions::new(0.02).recording_every(50);
    let x = propagate_amplitudes(&basis, &cached, &a0, 3.0, &opts).unwrap();
    let y = propagate_amplitudes(&basis, &direct, &a0, 3.0, &opts).unwrap();
    assert_eq!(x.len(), y.len());
    for (a, b) in x.iter().zip(&y) {
        for (p, q) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((p - q).norm() < 1e-12);
        }
    }
    // V_mn(t) against a direct evaluation
    let v = coupling_matrix(&direct, &basis, 0.7).unwrap();
    let e = matrix_element(&direct, &basis, 2, 1, 0.7).unwrap();
    assert!((v[(2, 1)] - e).norm() < 1e-14);
}

#[test]
fn amplitude_system_is_identical_under_energy_shift() {
    let c = PhysicalConstants::default();
    let (p0, g, basis) = oscillator(128, 4);
    let drive = dipole_drive(0.1, 1.0);
    let split = split_separable(&p0, &drive, &GaugeFunction::zero(), &g, &c);
    let gauged = split_separable(&p0, &drive, &GaugeFunction::uniform_rate("g", 0.2), &g, &c);
    let a0 = AmplitudeVector::basis_state(4, 0, 0.0);
    let opts = AmplitudeOptions::new(0.05);
    let x = propagate_amplitudes(&basis, &split, &a0, 5.0, &opts).unwrap();
    let y = propagate_amplitudes(&basis.shifted(-0.2 * c.charge), &gauged, &a0, 5.0, &opts).unwrap();
    assert_eq!(x, y);
}

#[test]
fn norm_drift_aborts() {
    let c = PhysicalConstants::default();
    let (p0, g, basis) = oscillator(128, 6);
    let drive = dipole_drive(2.0, 1.0);
    let split = split_separable(&p0, &drive, &GaugeFunction::zero(), &g, &c);
    let a0 = AmplitudeVector::basis_state(6, 0, 0.0);
    let r = propagate_amplitudes(&basis, &split, &a0, 20.0, &AmplitudeOptions::new(1.5));
    assert!(matches!(r, Err(GaugeLabError::NormDrift { .. })));
}

#[test]
fn split_reassembles_the_full_hamiltonian() {
    let c = PhysicalConstants::default();
    let chi = GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros());
    let shape = PotentialSet::new(
        VectorTimeField::new("A1", DomainBox::everywhere(), |r, _| Vec3::new(0.3 * (0.5 * r.x).sin(), 0.0, 0.0))
            .with_jacobian(|r, _| {
                let mut j = nalgebra::Matrix3::zeros();
                j[(0, 0)] = 0.15 * (0.5 * r.x).cos();
                j
            }),
        ScalarTimeField::new("phi1", DomainBox::everywhere(), |r, _| -0.2 * r.x),
        "smooth",
    );
    let p0 = PotentialSet::harmonic_trap(1.0, c.mass, c.charge, 1);
    let mut last = f64::INFINITY;
    for points in [256, 512] {
        let g = GridSpec::line(-8.0, 8.0, points).unwrap();
        let split = split_hamiltonian(&p0, &shape, &chi, &g, &c);
        let psi = Wavefunction::gaussian(&g, Vec3::new(0.3, 0.0, 0.0), 0.8, Vec3::new(0.5, 0.0, 0.0));
        let split_h = split.apply_total(&psi).unwrap();
        let full = build_hamiltonian(&p0.sum(&shape), &chi, &g, 0.0, &c).unwrap().apply(&psi.values);
        let diff = split_h
            .values
            .iter()
            .zip(&full)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < last / 3.0, "{points}: {diff:e}");
        last = diff;
    }
    assert!(last < 1e-3);
}

#[test]
fn crank_nicolson_conserves_norm_and_is_covariant() {
    let c = PhysicalConstants::default();
    let (p0, g, _) = oscillator(256, 2);
    let p = p0.sum(&dipole_drive(0.2, 1.0).potentials());
    let psi0 = Wavefunction::gaussian(&g, Vec3::new(1.0, 0.0, 0.0), 0.7, Vec3::zeros());
    let opts = PropagationOptions::new(0.01).recording_every(50);
    let plain = propagate_wavefunction(&p, &GaugeFunction::zero(), &psi0, 3.0, &opts, &c).unwrap();
    assert!(plain.max_norm_drift < 1e-12);
    for chi in [
        GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros()),
        GaugeFunction::uniform_rate("g", 0.2),
    ] {
        let start = apply_phase(&psi0, &chi, 1.0, &c);
        let gauged = propagate_wavefunction(&p, &chi, &start, 3.0, &opts, &c).unwrap();
        for (a, b) in plain.states.iter().zip(&gauged.states) {
            let back = apply_phase(b, &chi, -1.0, &c);
            let d = a.values.iter().zip(&back.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(d < 1e-10, "{} t={} d={d:e}", chi.name(), a.time);
        }
    }
}

#[test]
fn rebuilt_gauge_is_covariant_to_second_order() {
    let c = PhysicalConstants::default();
    let chi = GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros());
    let p = PotentialSet::harmonic_trap(1.0, c.mass, c.charge, 1);
    let mut errs = Vec::new();
    for points in [128, 256] {
        let g = GridSpec::line(-8.0, 8.0, points).unwrap();
        let psi0 = Wavefunction::gaussian(&g, Vec3::new(1.0, 0.0, 0.0), 0.7, Vec3::zeros());
        let opts = PropagationOptions::new(0.01).recording_every(100).with_mode(GaugeMode::Rebuilt);
        let plain = propagate_wavefunction(&p, &GaugeFunction::zero(), &psi0, 1.0, &opts, &c).unwrap();
        let start = apply_phase(&psi0, &chi, 1.0, &c);
        let gauged = propagate_wavefunction(&p, &chi, &start, 1.0, &opts, &c).unwrap();
        let a = plain.states.last().unwrap();
        let b = apply_phase(gauged.states.last().unwrap(), &chi, -1.0, &c);
        let d = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        errs.push(d);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(order > 1.8 && order < 2.2, "errors {errs:?}");
}

#[test]
fn two_dimensional_step_matches_eigenphase() {
    let c = PhysicalConstants::default();
    let g = GridSpec::square(-5.0, 5.0, 32).unwrap();
    let p = PotentialSet::harmonic_trap(1.0, c.mass, c.charge, 2);
    let h = build_hamiltonian(&p, &GaugeFunction::zero(), &g, 0.0, &c).unwrap();
    let b = solve_stationary(&h, 1).unwrap();
    let psi0 = b.states[0].clone();
    let dt = 0.02;
    let run = propagate_wavefunction(&p, &GaugeFunction::zero(), &psi0, 1.0, &PropagationOptions::new(dt), &c).unwrap();
    let last = run.states.last().unwrap();
    // Cayley phase of an eigenstate
    let tau = dt / (2.0 * c.hbar);
    let e = b.energy(0);
    let per_step = (Complex64::new(1.0, -tau * e) / Complex64::new(1.0, tau * e)).powi(50);
    let overlap = inner_product(&psi0.clone().at_time(last.time), last).unwrap();
    assert!((overlap - per_step).norm() < 1e-9, "{overlap} vs {per_step}");
    assert!(run.max_norm_drift < 1e-10);
}

#[test]
fn projection_recovers_basis_amplitudes() {
    let (_, _, basis) = oscillator(256, 4);
    let chi = GaugeFunction::linear("lin", Vec3::new(0.5, 0.0, 0.0));
    let t = 0.8;
    let s1 = gauge_lab::spectral::gauged_basis_state(&basis, 1, &chi, t).unwrap();
    let s3 = gauge_lab::spectral::gauged_basis_state(&basis, 3, &chi, t).unwrap();
    let mix = s1.with_values(
        s1.values
            .iter()
            .zip(&s3.values)
            .map(|(a, b)| a * 0.6 + b * Complex64::new(0.0, 0.8))
            .collect(),
    );
    let a = project_amplitudes(&mix, &basis, &chi).unwrap();
    assert!((a.coefficients[1] - 0.6).norm() < 1e-10);
    assert!((a.coefficients[3] - Complex64::new(0.0, 0.8)).norm() < 1e-10);
    assert!(a.coefficients[0].norm() < 1e-10);
}

#[test]
fn vanishing_perturbation_keeps_amplitudes_constant() {
    let c = PhysicalConstants::default();
    let (p0, g, basis) = oscillator(128, 4);
    let split = split_hamiltonian(&p0, &PotentialSet::zero(DomainBox::everywhere()), &GaugeFunction::zero(), &g, &c);
    assert_eq!(coupling_matrix(&split, &basis, 0.3).unwrap().iter().map(|v| v.norm()).fold(0.0, f64::max), 0.0);
    let a0 = AmplitudeVector::new(0.0, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
    let run = propagate_amplitudes(&basis, &split, &a0, 2.0, &AmplitudeOptions::new(0.1)).unwrap();
    for a in &run {
        assert_eq!(a.coefficients, a0.coefficients);
    }
}

#[test]
fn dipole_couplings_follow_the_ladder_formula() {
    let c = PhysicalConstants::default();
    let g = GridSpec::line(-12.0, 12.0, 1024).unwrap();
    let p0 = PotentialSet::harmonic_trap(1.0, c.mass, c.charge, 1);
    let basis = solve_stationary(&build_hamiltonian(&p0, &GaugeFunction::zero(), &g, 0.0, &c).unwrap(), 6).unwrap();
    let e0 = 0.01;
    let split = split_separable(&p0, &dipole_drive(e0, 1.0), &GaugeFunction::zero(), &g, &c);
    let v = coupling_matrix(&split, &basis, 0.0).unwrap();
    let scale = (c.hbar / (c.mass * 1.0)).sqrt();
    let (mut low, mut worst): (f64, f64) = (0.0, 0.0);
    for m in 0..4usize {
        for n in 0..4 {
            let want = if m.abs_diff(n) == 1 {
                -c.charge * e0 * scale * (m.max(n) as f64 / 2.0).sqrt()
            } else {
                0.0
            };
            // eigenvector signs are fixed, so compare magnitudes
            let d = (v[(m, n)].norm() - want.abs()).abs();
            worst = worst.max(d);
            if m.max(n) <= 2 {
                low = low.max(d);
            }
        }
    }
    // lattice error grows with the level, as for the energies
    assert!(low < 1e-6, "{low:e}");
    assert!(worst < 1e-5, "{worst:e}");
}

#[test]
fn stationary_state_stays_put() {
    let c = PhysicalConstants::default();
    let (p0, _, basis) = oscillator(256, 4);
    let psi0 = basis.states[3].clone();
    let run = propagate_wavefunction(&p0, &GaugeFunction::zero(), &psi0, 10.0, &PropagationOptions::new(0.01).recording_every(100), &c).unwrap();
    for s in &run.states {
        let o = inner_product(&psi0.clone().at_time(s.time), s).unwrap().norm();
        assert!((o - 1.0).abs() < 1e-6, "t={} overlap {o}", s.time);
    }
}

#[test]
fn projected_amplitudes_are_gauge_independent() {
    let c = PhysicalConstants::default();
    let (p0, g, basis) = oscillator(256, 6);
    let drive = dipole_drive(0.05, 1.0);
    let p = p0.sum(&drive.potentials());
    let psi0 = basis.states[0].clone();
    let opts = PropagationOptions::new(0.01).recording_every(20);
    let plain = propagate_wavefunction(&p, &GaugeFunction::zero(), &psi0, 4.0, &opts, &c).unwrap();
    let chi = GaugeFunction::sum(
        "fg",
        &GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros()),
        &GaugeFunction::uniform_rate("g", 0.2),
    );
    let gauged = propagate_wavefunction(&p, &chi, &apply_phase(&psi0, &chi, 1.0, &c), 4.0, &opts, &c).unwrap();
    let split = split_separable(&p0, &drive, &GaugeFunction::zero(), &g, &c);
    let ode = propagate_amplitudes(&basis, &split, &AmplitudeVector::basis_state(6, 0, 0.0), 4.0, &AmplitudeOptions::new(0.01).recording_every(20)).unwrap();
    for ((a, b), o) in plain.states.iter().zip(&gauged.states).zip(&ode) {
        let x = project_amplitudes(a, &basis, &GaugeFunction::zero()).unwrap();
        let y = project_amplitudes(b, &basis, &chi).unwrap();
        assert!(x.modulus_deviation(&y) < 1e-6, "t={}", a.time);
        assert!(x.norm_squared() <= 1.0 + 1e-10);
        // Crank-Nicolson against RK4 on the truncated system
        assert!(x.modulus_deviation(o) < 1e-3, "t={} {:e}", a.time, x.modulus_deviation(o));
    }
}

#[test]
fn dressed_couplings_converge_to_bare_ones() {
    let c = PhysicalConstants::default();
    let p1 = PotentialSet::new(
        VectorTimeField::new("A1", DomainBox::everywhere(), |r, t| Vec3::new(0.2 * (0.5 * r.x).sin() * (1.0 + t), 0.0, 0.0)),
        ScalarTimeField::new("phi1", DomainBox::everywhere(), |r, _| 0.1 * r.x),
        "velocity",
    );
    let chi = GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros());
    let errors: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| {
            let g = GridSpec::line(-12.0, 12.0, n).unwrap();
            let p0 = PotentialSet::harmonic_trap(1.0, c.mass, c.charge, 1);
            let basis = solve_stationary(&build_hamiltonian(&p0, &GaugeFunction::zero(), &g, 0.0, &c).unwrap(), 4).unwrap();
            let bare = coupling_matrix(&split_hamiltonian(&p0, &p1, &GaugeFunction::zero(), &g, &c), &basis, 0.5).unwrap();
            let dressed = coupling_matrix(&split_hamiltonian(&p0, &p1, &chi, &g, &c), &basis, 0.5).unwrap();
            (&bare - &dressed).iter().map(|v| v.norm()).fold(0.0, f64::max)
        })
        .collect();
    assert!(errors[0] > 0.0 && errors[2] < 1e-4, "{errors:?}");
    assert!(gauge_lab::convergence::worst_order(&errors, 2.0) >= 1.9, "{errors:?}");
}
