use std::sync::Arc;

use gauge_lab::emfields::catalog::{gauge_by_name, ramping_uniform_b, smooth_nonuniform, GaugeParams, GAUGE_NAMES};
use gauge_lab::emfields::*;
use gauge_lab::PhysicalConstants;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn samples(n: usize, seed: u64) -> Vec<(Vec3, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = Vec3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            (r, rng.random_range(0.0..3.0))
        })
        .collect()
}

fn catalog_potentials() -> Vec<PotentialSet> {
    vec![
        smooth_nonuniform(),
        ramping_uniform_b(1.0, 0.3),
        PotentialSet::symmetric_gauge(Vec3::new(0.2, -0.1, 1.0)).sum(&PotentialSet::uniform_electric(Vec3::new(0.3, 0.0, -0.2))),
        PotentialSet::harmonic_trap(1.0, 1.0, 1.0, 2),
    ]
}

#[test]
fn fields_are_gauge_invariant() {
    let params = GaugeParams::default();
    let pts = samples(100, 7);
    for p in catalog_potentials() {
        let f0 = derive_fields(&p);
        for name in GAUGE_NAMES {
            let chi = gauge_by_name(name, &params).unwrap();
            let f1 = derive_fields(&apply_gauge_transform(&p, &chi).unwrap());
            for (r, t) in &pts {
                let de = (f1.electric.value(r, *t) - f0.electric.value(r, *t)).amax();
                let db = (f1.magnetic.value(r, *t) - f0.magnetic.value(r, *t)).amax();
                assert!(de < 1e-8 && db < 1e-8, "{} / {name}: {de:e} {db:e}", p.label);
            }
        }
    }
}

#[test]
fn separable_gauge_shifts_potentials() {
    let p = smooth_nonuniform();
    let chi = gauge_by_name("separable-fg", &GaugeParams::default()).unwrap();
    let q = apply_gauge_transform(&p, &chi).unwrap();
    for (r, t) in samples(20, 3) {
        assert!((q.scalar.value(&r, t) - (p.scalar.value(&r, t) - 0.2)).abs() < 1e-15);
        let bump = chi.separable_form().unwrap().spatial.gradient(&r, 0.0);
        assert!((q.vector.value(&r, t) - p.vector.value(&r, t) - bump).amax() < 1e-15);
    }
    assert!(q.label.ends_with("separable-fg"));
}

#[test]
fn opposite_gauges_cancel() {
    let p = smooth_nonuniform();
    for name in GAUGE_NAMES {
        let chi = gauge_by_name(name, &GaugeParams::default()).unwrap();
        let back = apply_gauge_transform(&apply_gauge_transform(&p, &chi).unwrap(), &chi.negated()).unwrap();
        for (r, t) in samples(20, 11) {
            assert!((back.vector.value(&r, t) - p.vector.value(&r, t)).amax() < 1e-12);
            assert!((back.scalar.value(&r, t) - p.scalar.value(&r, t)).abs() < 1e-12);
        }
    }
}

#[test]
fn multipolar_uniform_b_is_symmetric_gauge() {
    let b0 = Vec3::new(0.3, -0.4, 1.2);
    let p = multipolar_potentials(&FieldSet::uniform(Vec3::zeros(), b0), Vec3::zeros());
    for (r, t) in samples(50, 5) {
        assert!((p.vector.value(&r, t) + r.cross(&b0) * 0.5).amax() < 1e-10);
    }
}

#[test]
fn multipolar_vector_is_transverse_to_the_lever_arm() {
    let f = derive_fields(&smooth_nonuniform());
    let origin = Vec3::new(0.2, -0.3, 0.1);
    let p = multipolar_potentials(&f, origin);
    for (r, t) in samples(30, 9) {
        assert!((r - origin).dot(&p.vector.value(&r, t)).abs() < 1e-12);
    }
}

#[test]
fn multipolar_potentials_reproduce_nonuniform_fields() {
    let f = derive_fields(&smooth_nonuniform());
    let g = derive_fields(&multipolar_potentials(&f, Vec3::zeros()));
    for (r, t) in samples(30, 13) {
        assert!((g.electric.value(&r, t) - f.electric.value(&r, t)).amax() < 1e-6);
        assert!((g.magnetic.value(&r, t) - f.magnetic.value(&r, t)).amax() < 1e-6);
    }
}

#[test]
fn coulomb_physical_potential() {
    let c = PhysicalConstants::default();
    let q = 1.7;
    let e = VectorTimeField::new("coulomb", DomainBox::everywhere(), move |r, _| r * (c.coulomb_k * q / r.norm().powi(3)));
    let f = FieldSet::new(e, VectorTimeField::zero(DomainBox::everywhere()));
    let origin = Vec3::new(2.0, 1.0, 0.0);
    for r in [Vec3::new(0.5, 1.5, 1.0), Vec3::new(3.0, -2.0, 0.4)] {
        let want = c.coulomb_k * q * (1.0 / r.norm() - 1.0 / origin.norm());
        assert!((physical_potential(&f, &origin, &r, 0.0).unwrap() - want).abs() < 1e-8);
        assert!((work(&f, &origin, &r, 0.0, &c).unwrap() - c.charge * want).abs() < 1e-8);
    }
    assert_eq!(physical_potential(&f, &origin, &origin, 0.0).unwrap(), 0.0);
}

#[test]
fn loop_emf_obeys_faraday() {
    let static_e = derive_fields(&smooth_nonuniform().sum(&PotentialSet::uniform_electric(Vec3::new(0.1, 0.2, 0.0))));
    let square = [
        Vec3::new(-0.5, -0.5, 0.3),
        Vec3::new(0.7, -0.5, 0.3),
        Vec3::new(0.7, 0.6, 0.3),
        Vec3::new(-0.5, 0.6, 0.3),
    ];
    // the smooth catalog entry has dA/dt != 0; use only its static scalar part
    let gradient_only = FieldSet::new(
        {
            let p = smooth_nonuniform();
            VectorTimeField::new("grad", DomainBox::everywhere(), move |r, _| -p.scalar.gradient(r, 0.0))
        },
        static_e.magnetic.clone(),
    );
    assert!(loop_emf(&gradient_only, &square, 0.0).unwrap().abs() < 1e-10);

    let bdot = 0.3;
    let f = derive_fields(&ramping_uniform_b(1.0, bdot));
    let area = 1.2 * 1.1;
    let emf = loop_emf(&f, &square, 0.5).unwrap();
    assert!((emf + bdot * area).abs() < 1e-6, "emf {emf}");
    let flat = [square[0], square[1], square[1], square[0]];
    assert_eq!(loop_emf(&f, &flat, 0.5).unwrap(), 0.0);
}

#[test]
fn static_source_potentials_are_time_independent() {
    let src = ChargeCurrentDensity::gaussian_charge(1.0, Vec3::new(0.1, 0.0, 0.0), 0.3)
        .combined(&ChargeCurrentDensity::current_loop(0.5, 0.8, 0.05, Vec3::zeros()));
    let p = static_potentials(&src, &SourceQuadrature::Cartesian { cells_per_axis: 16 }, &PhysicalConstants::default()).unwrap();
    for (r, _) in samples(10, 17) {
        assert!((p.scalar.value(&r, 0.0) - p.scalar.value(&r, 5.0)).abs() < 1e-14);
        assert!((p.vector.value(&r, 0.0) - p.vector.value(&r, 5.0)).amax() < 1e-14);
    }
}

#[test]
fn magnetic_fields_are_divergence_free() {
    let pts = samples(20, 19);
    for p in catalog_potentials() {
        let b = derive_fields(&p).magnetic;
        let f = FieldSet::new(VectorTimeField::zero(DomainBox::everywhere()), b);
        assert!(f.max_magnetic_divergence(&pts) < 1e-8, "{}", p.label);
    }
    let _ = Arc::new(0);
}
