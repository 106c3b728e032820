//! Named gauge functions and potentials used across the workbench.

use std::sync::Arc;

use nalgebra::Matrix3;

use super::field::{DomainBox, ScalarTimeField, Vec3, VectorTimeField};
use super::gauge::GaugeFunction;
use super::potentials::PotentialSet;

pub const GAUGE_NAMES: [&str; 5] = ["zero", "linear-x", "gaussian-bump", "g-times-t", "separable-fg"];

/// Parameters of the named gauge functions. Unused fields are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeParams {
    /// Slope of `linear-x`.
    pub slope: f64,
    /// Amplitude and width of `gaussian-bump`.
    pub amplitude: f64,
    pub width: f64,
    /// Rate of `g-times-t`.
    pub rate: f64,
}

impl Default for GaugeParams {
    fn default() -> Self {
        Self {
            slope: 0.5,
            amplitude: 0.3,
            width: 1.0,
            rate: 0.2,
        }
    }
}

/// Looks up a gauge function by catalog name.
pub fn gauge_by_name(name: &str, p: &GaugeParams) -> Option<GaugeFunction> {
    let bump = || GaugeFunction::gaussian_bump("gaussian-bump", p.amplitude, p.width, Vec3::zeros());
    let rate = || GaugeFunction::uniform_rate("g-times-t", p.rate);
    Some(match name {
        "zero" => GaugeFunction::zero(),
        "linear-x" => GaugeFunction::linear("linear-x", Vec3::new(p.slope, 0.0, 0.0)),
        "gaussian-bump" => bump(),
        "g-times-t" => rate(),
        "separable-fg" => GaugeFunction::sum("separable-fg", &bump(), &rate()),
        _ => return None,
    })
}

/// Time-dependent potentials with analytic derivatives, smooth and
/// nonuniform in every component. Used as a generic test subject for
/// gauge invariance and field reconstruction.
///
/// `A = (a sin(y) cos(w t), b x z, c cos(x + z) sin(w t))`,
/// `phi = d exp(-|r|^2 / 8) cos(w t)`.
pub fn smooth_nonuniform() -> PotentialSet {
    let (a, b, c, d, w) = (0.3, 0.2, 0.1, 0.4, 0.7);
    let dom = DomainBox::everywhere();
    let value = move |r: &Vec3, t: f64| {
        Vec3::new(
            a * r.y.sin() * (w * t).cos(),
            b * r.x * r.z,
            c * (r.x + r.z).cos() * (w * t).sin(),
        )
    };
    let jac = move |r: &Vec3, t: f64| {
        let s = -c * (r.x + r.z).sin() * (w * t).sin();
        Matrix3::new(
            0.0, a * r.y.cos() * (w * t).cos(), 0.0, //
            b * r.z, 0.0, b * r.x, //
            s, 0.0, s,
        )
    };
    let curl = move |r: &Vec3, t: f64| {
        let j = jac(r, t);
        Vec3::new(
            j[(2, 1)] - j[(1, 2)],
            j[(0, 2)] - j[(2, 0)],
            j[(1, 0)] - j[(0, 1)],
        )
    };
    let vector = VectorTimeField::new("A_smooth", dom, value)
        .with_jacobian(jac)
        .with_curl(curl)
        .with_divergence(move |r, t| jac(r, t).trace())
        .with_time_derivative(move |r, t| {
            Vec3::new(
                -a * w * r.y.sin() * (w * t).sin(),
                0.0,
                c * w * (r.x + r.z).cos() * (w * t).cos(),
            )
        });
    let env = Arc::new(move |r: &Vec3| d * (-r.norm_squared() / 8.0).exp());
    let (e1, e2, e3) = (env.clone(), env.clone(), env);
    let scalar = ScalarTimeField::new("phi_smooth", dom, move |r, t| e1(r) * (w * t).cos())
        .with_gradient(move |r, t| -r * (e2(r) * (w * t).cos() / 4.0))
        .with_time_derivative(move |r, t| -w * e3(r) * (w * t).sin());
    PotentialSet::new(vector, scalar, "smooth-nonuniform")
}

/// Uniform magnetic field ramping linearly in time, `B(t) = (B0 + Bdot t) z`,
/// in the symmetric gauge.
pub fn ramping_uniform_b(b0: f64, bdot: f64) -> PotentialSet {
    let dom = DomainBox::everywhere();
    let bz = move |t: f64| b0 + bdot * t;
    let vector = VectorTimeField::new("A_ramp", dom, move |r, t| {
        Vec3::new(-r.y, r.x, 0.0) * (0.5 * bz(t))
    })
    .with_curl(move |_, t| Vec3::new(0.0, 0.0, bz(t)))
    .with_divergence(|_, _| 0.0)
    .with_jacobian(move |_, t| {
        Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0) * (0.5 * bz(t))
    })
    .with_time_derivative(move |r, _| Vec3::new(-r.y, r.x, 0.0) * (0.5 * bdot));
    PotentialSet::new(vector, ScalarTimeField::zero(dom), "ramping-B")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_gauge_name_resolves() {
        let p = GaugeParams::default();
        for name in GAUGE_NAMES {
            let g = gauge_by_name(name, &p).unwrap();
            assert_eq!(g.name(), name);
            assert!(g.separable_form().is_some());
        }
        assert!(gauge_by_name("coulomb", &p).is_none());
    }

    #[test]
    fn catalog_derivatives_match_finite_differences() {
        let samples: Vec<(Vec3, f64)> = (0..12)
            .map(|k| {
                let s = k as f64;
                (Vec3::new((0.7 * s).sin() * 2.0, (1.3 * s).cos(), 0.4 * s - 2.0), 0.25 * s)
            })
            .collect();
        for p in [smooth_nonuniform(), ramping_uniform_b(1.0, 0.3)] {
            assert!(p.vector.check_derivatives(&samples, 1e-4).worst() < 1e-7, "{}", p.label);
            assert!(p.scalar.check_derivatives(&samples, 1e-4).worst() < 1e-7, "{}", p.label);
        }
        let params = GaugeParams::default();
        for name in GAUGE_NAMES {
            let g = gauge_by_name(name, &params).unwrap();
            assert!(g.validate(&samples, 1e-4).worst() < 1e-7, "{name}");
        }
    }
}
