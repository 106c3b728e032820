use gauge_lab::convergence::worst_order;
use gauge_lab::emfields::catalog::smooth_nonuniform;
use gauge_lab::emfields::{GaugeFunction, PotentialSet, Vec3};
use gauge_lab::lattice::*;
use gauge_lab::spectral::solve_stationary;
use gauge_lab::{GaugeLabError, PhysicalConstants};
use num_complex::Complex64;

fn packet(grid: &GridSpec) -> Wavefunction {
    Wavefunction::gaussian(grid, Vec3::new(0.3, -0.2, 0.0), 1.0, Vec3::new(0.7, -0.4, 0.0)).normalized_copy()
}

#[test]
fn free_laplacian_matches_second_derivative() {
    let c = PhysicalConstants::default();
    let g = GridSpec::line(-8.0, 8.0, 400).unwrap();
    let h = build_hamiltonian(&PotentialSet::zero(g.bounding_box()), &GaugeFunction::zero(), &g, 0.0, &c).unwrap();
    let psi = Wavefunction::from_fn(&g, 0.0, |r| Complex64::new((-r.x * r.x).exp(), 0.0));
    let out = h.apply(&psi.values);
    for (j, r) in g.positions().iter().enumerate().filter(|(j, _)| g.margin(*j) >= 1) {
        let x = r.x;
        let want = -0.5 * (4.0 * x * x - 2.0) * (-x * x).exp();
        assert!((out[j].re - want).abs() < 1e-3 && out[j].im.abs() < 1e-15, "x={x}");
    }
}

#[test]
fn hamiltonians_are_hermitian() {
    let c = PhysicalConstants::default();
    let p = smooth_nonuniform();
    let chi = GaugeFunction::gaussian_bump("bump", 0.4, 1.0, Vec3::zeros());
    for g in [GridSpec::line(-4.0, 4.0, 64).unwrap(), GridSpec::square(-4.0, 4.0, 24).unwrap()] {
        let h = build_hamiltonian(&p, &chi, &g, 0.7, &c).unwrap();
        assert!(h.hermiticity_residual() < 1e-12);
        let d = h.to_dense();
        assert!((&d - d.adjoint()).camax() < 1e-12);
    }
}

#[test]
fn phase_conjugation_is_a_similarity_transform() {
    let c = PhysicalConstants::default();
    let g = GridSpec::line(-10.0, 10.0, 256).unwrap();
    let p = PotentialSet::harmonic_trap(1.0, 1.0, 1.0, 1);
    let chi = GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros());
    let h0 = build_hamiltonian(&p, &GaugeFunction::zero(), &g, 0.0, &c).unwrap();
    let bare = solve_stationary(&h0, 6).unwrap().energies();
    let similar = solve_stationary(&h0.phase_conjugated(&chi), 6).unwrap().energies();
    for (a, b) in bare.iter().zip(&similar) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn rebuilt_spectrum_converges_to_bare() {
    let c = PhysicalConstants::default();
    let p = PotentialSet::harmonic_trap(1.0, 1.0, 1.0, 1);
    let chi = GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros());
    let errors: Vec<f64> = [128, 256, 512]
        .iter()
        .map(|&n| {
            let g = GridSpec::line(-10.0, 10.0, n).unwrap();
            let bare = solve_stationary(&build_hamiltonian(&p, &GaugeFunction::zero(), &g, 0.0, &c).unwrap(), 4).unwrap();
            let gauged = solve_stationary(&build_hamiltonian(&p, &chi, &g, 0.0, &c).unwrap(), 4).unwrap();
            bare.energies().iter().zip(gauged.energies()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(errors[0] > 1e-9, "{errors:?}");
    assert!(worst_order(&errors, 2.0) > 1.8, "{errors:?}");
}

#[test]
fn phase_preserves_norm_and_round_trips() {
    let c = PhysicalConstants::default();
    let g = GridSpec::square(-4.0, 4.0, 32).unwrap();
    let psi = packet(&g);
    let chi = GaugeFunction::gaussian_bump("bump", 0.8, 1.2, Vec3::new(0.5, 0.0, 0.0));
    let dressed = apply_phase(&psi, &chi, 1.0, &c);
    assert!((dressed.norm() - psi.norm()).abs() < 1e-14);
    let back = apply_phase(&dressed, &chi, -1.0, &c);
    for (a, b) in back.values.iter().zip(&psi.values) {
        assert!((a - b).norm() < 1e-14);
    }
}

#[test]
fn inner_products() {
    let g = GridSpec::line(-6.0, 6.0, 128).unwrap();
    let a = packet(&g);
    let b = Wavefunction::gaussian(&g, Vec3::new(-0.5, 0.0, 0.0), 0.8, Vec3::zeros()).normalized_copy();
    assert!((inner_product(&a, &a).unwrap().re - 1.0).abs() < 1e-12);
    let ab = inner_product(&a, &b).unwrap();
    let ba = inner_product(&b, &a).unwrap();
    assert!((ab - ba.conj()).norm() < 1e-15);
    assert!(ab.norm() <= 1.0);

    let other = GridSpec::line(-6.0, 6.0, 64).unwrap();
    assert!(matches!(
        inner_product(&a, &Wavefunction::zeros(&other, 0.0)),
        Err(GaugeLabError::GridMismatch(_))
    ));
    assert!(matches!(
        inner_product(&a, &b.clone().at_time(1.0)),
        Err(GaugeLabError::GridMismatch(_))
    ));
}

#[test]
fn coarse_grids_are_rejected() {
    assert!(matches!(
        GridSpec::line(0.0, 1.0, 8),
        Err(GaugeLabError::GridTooCoarse { .. })
    ));
}

fn identity_orders(chi: &GaugeFunction, s: u32) -> (Vec<f64>, f64) {
    let c = PhysicalConstants::default();
    let p = smooth_nonuniform();
    let errors: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let g = GridSpec::square(-3.0, 3.0, n).unwrap();
            let psi = Wavefunction::gaussian(&g, Vec3::new(0.2, 0.1, 0.0), 0.7, Vec3::new(0.5, 0.0, 0.0)).at_time(0.4);
            identity_9_residual(&psi, &p, chi, s, &c).unwrap()
        })
        .collect();
    let order = worst_order(&errors, 2.0);
    (errors, order)
}

#[test]
fn zero_gauge_satisfies_momentum_identity_exactly() {
    let c = PhysicalConstants::default();
    let g = GridSpec::line(-4.0, 4.0, 64).unwrap();
    let psi = packet(&g);
    for s in [1, 2] {
        assert_eq!(identity_9_residual(&psi, &smooth_nonuniform(), &GaugeFunction::zero(), s, &c).unwrap(), 0.0);
    }
}

#[test]
fn linear_gauge_momentum_identity_converges() {
    let (errors, order) = identity_orders(&GaugeFunction::linear("cx", Vec3::new(0.8, -0.3, 0.0)), 1);
    assert!(order >= 1.9, "{errors:?}");
}

#[test]
fn polynomial_gauge_squared_identity_converges() {
    let chi = GaugeFunction::polynomial("poly", vec![([2, 0, 0], 0.2), ([1, 1, 0], -0.3), ([0, 3, 0], 0.05)]);
    let (errors, order) = identity_orders(&chi, 2);
    assert!(order >= 1.9, "{errors:?}");
}

#[test]
fn rejects_higher_powers() {
    let c = PhysicalConstants::default();
    let g = GridSpec::line(-4.0, 4.0, 32).unwrap();
    assert!(identity_9_residual(&packet(&g), &smooth_nonuniform(), &GaugeFunction::zero(), 3, &c).is_err());
}
