use approx::assert_abs_diff_eq;
use gauge_lab::emfields::catalog::smooth_nonuniform;
use gauge_lab::emfields::*;
use gauge_lab::lattice::*;
use gauge_lab::PhysicalConstants;
use num_complex::Complex64;
use proptest::prelude::*;

fn vec3(lim: f64) -> impl Strategy<Value = Vec3> {
    (-lim..lim, -lim..lim, -lim..lim).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn packet(grid: &GridSpec, x0: f64, k: f64, w: f64) -> Wavefunction {
    Wavefunction::gaussian(grid, Vec3::new(x0, 0.3 * x0, 0.0), w, Vec3::new(k, -k, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_is_hermitian(amp in -1.0..1.0f64, width in 0.5..2.0f64, t in 0.0..3.0f64) {
        let c = PhysicalConstants::default();
        let g = GridSpec::square(-3.0, 3.0, 20).unwrap();
        let chi = GaugeFunction::gaussian_bump("bump", amp, width, Vec3::zeros());
        let h = build_hamiltonian(&smooth_nonuniform(), &chi, &g, t, &c).unwrap();
        prop_assert!(h.hermiticity_residual() < 1e-12);
    }

    #[test]
    fn phase_round_trip(amp in -2.0..2.0f64, x0 in -1.0..1.0f64, k in -2.0..2.0f64) {
        let c = PhysicalConstants::default();
        let g = GridSpec::line(-5.0, 5.0, 64).unwrap();
        let psi = packet(&g, x0, k, 0.8);
        let chi = GaugeFunction::gaussian_bump("bump", amp, 1.0, Vec3::new(x0, 0.0, 0.0));
        let back = apply_phase(&apply_phase(&psi, &chi, 1.0, &c), &chi, -1.0, &c);
        for (a, b) in back.values.iter().zip(&psi.values) {
            prop_assert!((a - b).norm() < 1e-14);
        }
        assert_abs_diff_eq!(apply_phase(&psi, &chi, 1.0, &c).norm(), psi.norm(), epsilon = 1e-13);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(x0 in -1.0..1.0f64, x1 in -1.0..1.0f64, k in -2.0..2.0f64) {
        let g = GridSpec::line(-5.0, 5.0, 64).unwrap();
        let a = packet(&g, x0, k, 0.7);
        let b = packet(&g, x1, -k, 1.1);
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-14);
        let aa = inner_product(&a, &a).unwrap();
        prop_assert!(aa.im.abs() < 1e-15 && aa.re > 0.0);
    }

    #[test]
    fn fields_ignore_gauge(r in vec3(2.0), t in 0.0..3.0f64, amp in -1.0..1.0f64, rate in -1.0..1.0f64) {
        let p = smooth_nonuniform();
        let chi = GaugeFunction::sum(
            "fg",
            &GaugeFunction::gaussian_bump("bump", amp, 1.0, Vec3::zeros()),
            &GaugeFunction::uniform_rate("g", rate),
        );
        let f0 = derive_fields(&p);
        let f1 = derive_fields(&apply_gauge_transform(&p, &chi).unwrap());
        prop_assert!((f0.electric.value(&r, t) - f1.electric.value(&r, t)).amax() < 1e-8);
        prop_assert!((f0.magnetic.value(&r, t) - f1.magnetic.value(&r, t)).amax() < 1e-8);
    }

    #[test]
    fn multipolar_vector_is_radial_free(r in vec3(2.0), origin in vec3(0.5), t in 0.0..3.0f64) {
        let p = multipolar_potentials(&derive_fields(&smooth_nonuniform()), origin);
        prop_assert!((r - origin).dot(&p.vector.value(&r, t)).abs() < 1e-12);
    }

    #[test]
    fn normalized_copy_has_unit_norm(x0 in -1.0..1.0f64, scale in 0.1..10.0f64) {
        let g = GridSpec::line(-5.0, 5.0, 48).unwrap();
        let psi = packet(&g, x0, 0.5, 0.9);
        let big = psi.with_values(psi.values.iter().map(|v| v * Complex64::new(scale, 0.0)).collect());
        assert_abs_diff_eq!(big.normalized_copy().norm(), 1.0, epsilon = 1e-14);
    }
}
