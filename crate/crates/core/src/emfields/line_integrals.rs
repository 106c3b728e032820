//! Straight-line integrals of the fields: multipolar (Poincaré) potentials,
//! the physical potential and loop circulations.

use super::field::{ScalarTimeField, Vec3, VectorTimeField};
use super::potentials::{FieldSet, PotentialSet};
use crate::constants::PhysicalConstants;
use crate::error::{point_array, GaugeLabError, Result};
use crate::quadrature::{integrate_unit, Adaptive, DEFAULT_TOLERANCE};

fn checked<T: Copy>(out: Adaptive<T>, r: &Vec3, magnitude: impl Fn(&T) -> f64) -> Result<T> {
    if out.converged {
        Ok(out.value)
    } else {
        Err(GaugeLabError::QuadratureNotConverged {
            point: point_array(r),
            estimate: magnitude(&out.value),
            change: out.change,
        })
    }
}

/// Multipolar potentials at one point, expanded about `origin`:
///
/// `phi(r) = -(r - R) . int_0^1 E(q) du`,
/// `A(r) = -(r - R) x int_0^1 B(q) u du`, with `q = u r + (1 - u) R`.
pub fn multipolar_point(f: &FieldSet, origin: &Vec3, r: &Vec3, t: f64) -> Result<(f64, Vec3)> {
    let d = r - origin;
    let e = integrate_unit(|u| f.electric.value(&(origin + d * u), t), DEFAULT_TOLERANCE);
    let e = checked(e, r, |v| v.amax())?;
    let b = integrate_unit(|u| f.magnetic.value(&(origin + d * u), t) * u, DEFAULT_TOLERANCE);
    let b = checked(b, r, |v| v.amax())?;
    Ok((-d.dot(&e), -d.cross(&b)))
}

/// The multipolar gauge as a [`PotentialSet`]. Evaluation is infallible;
/// use [`multipolar_point`] where the quadrature must be certified.
pub fn multipolar_potentials(f: &FieldSet, origin: Vec3) -> PotentialSet {
    let domain = f.domain();
    let e = f.electric.clone();
    let scalar = ScalarTimeField::new("phi_multipolar", domain, move |r, t| {
        let d = r - origin;
        let int = integrate_unit(|u| e.value(&(origin + d * u), t), DEFAULT_TOLERANCE);
        -d.dot(&int.value)
    });
    let b = f.magnetic.clone();
    let vector = VectorTimeField::new("A_multipolar", domain, move |r, t| {
        let d = r - origin;
        let int = integrate_unit(|u| b.value(&(origin + d * u), t) * u, DEFAULT_TOLERANCE);
        -d.cross(&int.value)
    });
    PotentialSet::new(vector, scalar, "multipolar")
}

/// `-int_a^b E(q, t) . dq` along the straight segment.
fn segment_integral(f: &FieldSet, a: &Vec3, b: &Vec3, t: f64) -> Result<f64> {
    let d = b - a;
    let out = integrate_unit(|u| f.electric.value(&(a + d * u), t).dot(&d), DEFAULT_TOLERANCE);
    checked(out, b, |v| v.abs()).map(|v| -v)
}

/// Physical potential `-int_R^r E . dq` along the straight segment, without
/// the particle charge.
pub fn physical_potential(f: &FieldSet, origin: &Vec3, r: &Vec3, t: f64) -> Result<f64> {
    if r == origin {
        return Ok(0.0);
    }
    segment_integral(f, origin, r, t)
}

/// Work done bringing the particle from `origin` to `r`: `e` times the
/// physical potential.
pub fn work(f: &FieldSet, origin: &Vec3, r: &Vec3, t: f64, c: &PhysicalConstants) -> Result<f64> {
    Ok(c.charge * physical_potential(f, origin, r, t)?)
}

/// Circulation of `E` around the closed polygon `corners[0] -> ... -> corners[3] -> corners[0]`.
pub fn loop_emf(f: &FieldSet, corners: &[Vec3; 4], t: f64) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        if a != b {
            total -= segment_integral(f, &a, &b, t)?;
        }
    }
    Ok(total)
}
