//! `int_0^1 du / |u r - r'|` in closed form.

use crate::emfields::Vec3;

/// Elements whose `1 - cos(theta)` falls below this are treated as collinear.
pub const CONE_EXCLUSION: f64 = 1e-9;

/// `x` such that `int_0^1 du / |u r - r'| = ln(1 + x) / |r|`.
///
/// With `rho = |r|/|r'|`, `D = |r - r'|/|r'|` and `c = cos(theta)`,
/// `x = (D + rho - 1) / (1 - c)`. For `rho <= 1` the numerator cancels, so it
/// is rewritten as `2 rho / (D + 1 - rho)` using
/// `D^2 - (rho - 1)^2 = 2 rho (1 - c)`.
pub fn log_argument(r: &Vec3, source: &Vec3) -> f64 {
    let (rn, sn) = (r.norm(), source.norm());
    let rho = rn / sn;
    let d = (r - source).norm() / sn;
    if rho <= 1.0 {
        2.0 * rho / (d + 1.0 - rho)
    } else {
        let c = r.dot(source) / (rn * sn);
        (rho - 1.0 + d) / (1.0 - c)
    }
}

/// `int_0^1 du / |u r - r'|` in closed form. Undefined on the segment.
pub fn segment_kernel(r: &Vec3, source: &Vec3) -> f64 {
    log_argument(r, source).ln_1p() / r.norm()
}

/// Unstabilized `(D + rho - 1) / (1 - c)`.
pub fn log_argument_direct(r: &Vec3, source: &Vec3) -> f64 {
    let (rn, sn) = (r.norm(), source.norm());
    let c = r.dot(source) / (rn * sn);
    ((r - source).norm() / sn + rn / sn - 1.0) / (1.0 - c)
}

/// Distance from `p` to the segment from the origin to `r`.
pub fn distance_to_segment(r: &Vec3, p: &Vec3) -> f64 {
    let rr = r.norm_squared();
    if rr == 0.0 {
        return p.norm();
    }
    let u = (p.dot(r) / rr).clamp(0.0, 1.0);
    (r * u - p).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_unit;

    #[test]
    fn matches_direct_integration() {
        let cases = [
            (Vec3::new(0.3, 0.2, 0.5), Vec3::new(1.0, 0.0, 0.0)),
            (Vec3::new(2.0, -1.0, 0.7), Vec3::new(0.0, 1.0, 0.1)),
            (Vec3::new(-0.1, 0.05, 0.02), Vec3::new(0.7, 0.7, 0.0)),
            (Vec3::new(1.5, 1.4, 0.3), Vec3::new(1.0, 1.0, 0.0)),
        ];
        for (r, s) in cases {
            let q = integrate_unit(|u| 1.0 / (r * u - s).norm(), 1e-14);
            assert!(q.converged);
            let k = segment_kernel(&r, &s);
            assert!((k - q.value).abs() < 1e-12 * q.value, "{r:?} {s:?}: {k} vs {}", q.value);
        }
    }

    #[test]
    fn stabilized_form_agrees_where_direct_is_safe() {
        for (r, s) in [
            (Vec3::new(0.2, 0.9, 0.1), Vec3::new(1.0, 0.2, -0.3)),
            (Vec3::new(0.5, -0.5, 0.5), Vec3::new(0.0, 1.0, 0.0)),
            (Vec3::new(3.0, 0.0, 0.1), Vec3::new(0.0, 0.0, 1.0)),
        ] {
            let a = log_argument(&r, &s);
            let b = log_argument_direct(&r, &s);
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn stabilized_form_survives_near_the_source_sphere() {
        // rho -> 1 on the near side, where D + rho - 1 cancels
        let s = Vec3::new(1.0, 0.0, 0.0);
        let r = Vec3::new(1e-7, 1.0, 0.0).normalize() * (1.0 - 1e-9);
        let q = integrate_unit(|u| 1.0 / (r * u - s).norm(), 1e-14);
        assert!((segment_kernel(&r, &s) - q.value).abs() < 1e-12 * q.value);
    }

    #[test]
    fn segment_distance() {
        let r = Vec3::new(2.0, 0.0, 0.0);
        assert!((distance_to_segment(&r, &Vec3::new(1.0, 1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((distance_to_segment(&r, &Vec3::new(3.0, 0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((distance_to_segment(&r, &Vec3::new(-1.0, 0.0, 0.0)) - 1.0).abs() < 1e-15);
    }
}
