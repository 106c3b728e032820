use std::sync::Arc;

use super::closed_form::{distance_to_segment, segment_kernel, CONE_EXCLUSION};
use crate::constants::PhysicalConstants;
use crate::emfields::sources::{discretize, regularized_kernel};
use crate::emfields::{
    derive_fields, multipolar_point, ChargeCurrentDensity, GaugeFunction, ScalarTimeField,
    SourceElements, SourceQuadrature, Vec3,
};
use crate::error::{point_array, GaugeLabError, Result};
use crate::finite_diff::FD_STEP;
use crate::quadrature::{integrate_unit, DEFAULT_TOLERANCE};

/// Guard radius around source elements, in source cells.
pub const GUARD_CELLS: f64 = 2.0;

/// A value plus a flag raised when a regularized kernel or a fallback path
/// was needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub flagged: bool,
}

fn guard(elements: &SourceElements) -> f64 {
    GUARD_CELLS * elements.cell_size
}

/// `g = k_C int rho(r') / |r'| dr'`, the static potential at the origin.
///
/// Flagged when charge sits within the regularization radius of the origin.
pub fn offset_g(elements: &SourceElements, c: &PhysicalConstants) -> Flagged<f64> {
    let a = elements.regularization();
    let mut sum = 0.0;
    let mut flagged = false;
    for e in &elements.elements {
        if e.charge == 0.0 {
            continue;
        }
        let d = e.position.norm();
        flagged |= d <= a;
        sum += e.charge * regularized_kernel(d, a);
    }
    Flagged {
        value: c.coulomb_k * sum,
        flagged,
    }
}

/// `f(r) = -k_B sum_elements (J dV . r) int_0^1 du / |u r - r'|`, the
/// u-integral by adaptive Gauss-Legendre on the whole element sum.
///
/// Flagged when the segment from the origin to `r` passes within the guard
/// radius of a current element; there the regularized kernel is used.
pub fn f_quadrature(elements: &SourceElements, r: &Vec3, c: &PhysicalConstants) -> Result<Flagged<f64>> {
    if r.norm() == 0.0 {
        return Ok(Flagged {
            value: 0.0,
            flagged: false,
        });
    }
    let g = guard(elements);
    let flagged = elements
        .elements
        .iter()
        .any(|e| e.current != Vec3::zeros() && distance_to_segment(r, &e.position) < g);
    let q = integrate_unit(|u| r.dot(&elements.vector_potential_at(&(r * u), c)), DEFAULT_TOLERANCE);
    if !q.converged && !flagged {
        return Err(GaugeLabError::QuadratureNotConverged {
            point: point_array(r),
            estimate: q.value,
            change: q.change,
        });
    }
    Ok(Flagged {
        value: -q.value,
        flagged,
    })
}

/// `f(r) = -k_B sum_elements (J dV . r) ln(1 + x) / |r|`.
///
/// Elements in the excluded cone or within the guard radius of the segment
/// fall back to the regularized u-quadrature, and the result is flagged.
pub fn f_closed_form(elements: &SourceElements, r: &Vec3, c: &PhysicalConstants) -> Result<Flagged<f64>> {
    let rn = r.norm();
    if rn == 0.0 {
        return Ok(Flagged {
            value: 0.0,
            flagged: false,
        });
    }
    let g = guard(elements);
    let a = elements.regularization();
    let mut sum = 0.0;
    let mut flagged = false;
    for e in &elements.elements {
        let jr = e.current.dot(r);
        if jr == 0.0 {
            continue;
        }
        let sn = e.position.norm();
        let cos = if sn == 0.0 { 1.0 } else { r.dot(&e.position) / (rn * sn) };
        let kernel = if 1.0 - cos > CONE_EXCLUSION && distance_to_segment(r, &e.position) >= g {
            segment_kernel(r, &e.position)
        } else {
            flagged = true;
            let q = integrate_unit(|u| regularized_kernel((r * u - e.position).norm(), a), DEFAULT_TOLERANCE);
            q.value
        };
        sum += jr * kernel;
    }
    Ok(Flagged {
        value: -c.biot_k * sum,
        flagged,
    })
}

/// How [`GaugeBridge`] evaluates `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FMethod {
    Quadrature,
    ClosedForm,
}

/// `chi(r, t) = f(r) + g t` taking the static-source potentials to the
/// multipolar ones about the origin.
#[derive(Debug, Clone)]
pub struct GaugeBridge {
    pub g: f64,
    pub method: FMethod,
    pub source: ChargeCurrentDensity,
    pub elements: Arc<SourceElements>,
    pub constants: PhysicalConstants,
}

impl GaugeBridge {
    pub fn new(
        source: &ChargeCurrentDensity,
        quad: &SourceQuadrature,
        method: FMethod,
        c: &PhysicalConstants,
    ) -> Result<Self> {
        let elements = Arc::new(discretize(source, quad)?);
        Ok(Self {
            g: offset_g(&elements, c).value,
            method,
            source: source.clone(),
            elements,
            constants: *c,
        })
    }

    pub fn f(&self, r: &Vec3) -> Result<Flagged<f64>> {
        match self.method {
            FMethod::Quadrature => f_quadrature(&self.elements, r, &self.constants),
            FMethod::ClosedForm => f_closed_form(&self.elements, r, &self.constants),
        }
    }

    /// `grad f` by fourth-order central differences with step `h`.
    pub fn grad_f(&self, r: &Vec3, h: f64) -> Result<Vec3> {
        let mut out = Vec3::zeros();
        for a in 0..3 {
            let at = |k: f64| -> Result<f64> {
                let mut p = *r;
                p[a] += k * h;
                Ok(self.f(&p)?.value)
            };
            // fourth-order central stencil, as in `finite_diff::derivative4`
            out[a] = (8.0 * (at(1.0)? - at(-1.0)?) - (at(2.0)? - at(-2.0)?)) / (12.0 * h);
        }
        Ok(out)
    }

    /// The bridge as a gauge function. Points where `f` fails evaluate to NaN.
    pub fn gauge_function(&self) -> GaugeFunction {
        let (b1, b2) = (self.clone(), self.clone());
        let spatial = ScalarTimeField::new(
            "f",
            crate::emfields::DomainBox::everywhere(),
            move |r, _| b1.f(r).map(|v| v.value).unwrap_or(f64::NAN),
        )
        .with_gradient(move |r, _| b2.grad_f(r, FD_STEP).unwrap_or(Vec3::repeat(f64::NAN)));
        let g = self.g;
        GaugeFunction::separable(
            format!("bridge({})", self.source.name),
            spatial,
            Arc::new(move |t| g * t),
            Arc::new(move |_| g),
        )
    }
}

/// Residuals of `A2 = A1 + grad f` and `phi2 = phi1 - g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeRelationReport {
    pub residual_a: f64,
    pub residual_phi: f64,
    pub flagged: bool,
}

/// Compares the static-source potentials with the multipolar potentials of
/// their own fields at each sample point, `grad f` by central differences of
/// [`f_quadrature`] with step `h_fd`.
pub fn verify_gauge_relation(
    source: &ChargeCurrentDensity,
    samples: &[Vec3],
    quad: &SourceQuadrature,
    h_fd: f64,
    c: &PhysicalConstants,
) -> Result<GaugeRelationReport> {
    let bridge = GaugeBridge::new(source, quad, FMethod::Quadrature, c)?;
    let static_p = bridge.elements.potentials(c);
    let fields = derive_fields(&static_p);
    let origin = Vec3::zeros();
    let mut report = GaugeRelationReport {
        residual_a: 0.0,
        residual_phi: 0.0,
        flagged: offset_g(&bridge.elements, c).flagged,
    };
    for r in samples {
        let (phi2, a2) = multipolar_point(&fields, &origin, r, 0.0)?;
        let a1 = static_p.vector.value(r, 0.0);
        let phi1 = static_p.scalar.value(r, 0.0);
        let grad = bridge.grad_f(r, h_fd)?;
        for a in 0..3 {
            let mut p = *r;
            p[a] += h_fd;
            report.flagged |= bridge.f(&p)?.flagged;
        }
        report.residual_a = report.residual_a.max((a2 - a1 - grad).amax());
        report.residual_phi = report.residual_phi.max((phi2 - phi1 + bridge.g).abs());
    }
    Ok(report)
}

/// `count` points with `r_min <= |r| <= r_max`, drawn from a fixed seed, whose
/// segments from the origin stay at least `clearance` plus the regularization
/// radius away from every source element.
pub fn generic_points(
    elements: &SourceElements,
    count: usize,
    r_min: f64,
    r_max: f64,
    clearance: f64,
    seed: u64,
) -> Result<Vec<Vec3>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let positions: Vec<Vec3> = elements.elements.iter().map(|e| e.position).collect();
    let keep_out = clearance + elements.regularization();
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1) {
            return Err(GaugeLabError::InvalidInput(format!(
                "found only {} of {count} points clear of the source",
                out.len()
            )));
        }
        let d = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = d.norm();
        if !(0.1..=1.0).contains(&n) {
            continue;
        }
        let r = d / n * rng.random_range(r_min..r_max);
        if positions.iter().all(|p| distance_to_segment(&r, p) >= keep_out) {
            out.push(r);
        }
    }
    Ok(out)
}
