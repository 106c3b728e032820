//! Static charge/current sources and the electro- and magnetostatic
//! potentials they produce.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::field::{DomainBox, ScalarTimeField, Vec3, VectorTimeField};
use super::potentials::PotentialSet;
use crate::constants::PhysicalConstants;
use crate::error::{GaugeLabError, Result};
use crate::quadrature::GaussLegendre;

pub type DensityFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;
pub type CurrentFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;

/// Relative level below which a density counts as vanished.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Time-independent `rho(r)` and `J(r)` supported in a ball.
#[derive(Clone)]
pub struct ChargeCurrentDensity {
    pub name: String,
    pub rho: DensityFn,
    pub current: CurrentFn,
    pub center: Vec3,
    pub support_radius: f64,
}

impl fmt::Debug for ChargeCurrentDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChargeCurrentDensity")
            .field("name", &self.name)
            .field("center", &self.center)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

/// `sqrt(2 ln(1/threshold))`: Gaussian tails fall below the support threshold
/// this many widths out.
fn gaussian_cutoff() -> f64 {
    (2.0 * (1.0 / SUPPORT_THRESHOLD).ln()).sqrt()
}

impl ChargeCurrentDensity {
    pub fn empty() -> Self {
        Self {
            name: "empty".into(),
            rho: Arc::new(|_| 0.0),
            current: Arc::new(|_| Vec3::zeros()),
            center: Vec3::zeros(),
            support_radius: 1.0,
        }
    }

    /// Gaussian charge blob of total charge `q`.
    pub fn gaussian_charge(q: f64, center: Vec3, width: f64) -> Self {
        let norm = q / (2.0 * PI * width * width).powf(1.5);
        let inv = 0.5 / (width * width);
        let cutoff = gaussian_cutoff() * width;
        Self {
            name: "gaussian-charge".into(),
            rho: Arc::new(move |r| {
                let d2 = (r - center).norm_squared();
                if d2 > cutoff * cutoff {
                    0.0
                } else {
                    norm * (-d2 * inv).exp()
                }
            }),
            current: Arc::new(|_| Vec3::zeros()),
            center,
            support_radius: cutoff,
        }
    }

    /// Thin spherical shell of total charge `q` around the origin with a
    /// Gaussian radial profile of the given width.
    pub fn spherical_shell(q: f64, radius: f64, width: f64) -> Self {
        let cutoff = gaussian_cutoff() * width;
        let lo = (radius - cutoff).max(0.0);
        let hi = radius + cutoff;
        let profile = move |s: f64| (-0.5 * ((s - radius) / width).powi(2)).exp();
        // normalize int 4 pi s^2 profile ds = 1 numerically
        let gl = GaussLegendre::new(128);
        let total = gl.integrate(|u| {
            let s = lo + u * (hi - lo);
            4.0 * PI * s * s * profile(s) * (hi - lo)
        });
        let norm = q / total;
        Self {
            name: "spherical-shell".into(),
            rho: Arc::new(move |r| {
                let s = r.norm();
                if s < lo || s > hi {
                    0.0
                } else {
                    norm * profile(s)
                }
            }),
            current: Arc::new(|_| Vec3::zeros()),
            center: Vec3::zeros(),
            support_radius: hi,
        }
    }

    /// Circular current loop of radius `radius` in the `z = center.z` plane,
    /// carrying `current` counter-clockwise about +z, with a Gaussian tube
    /// cross-section of the given width.
    pub fn current_loop(current: f64, radius: f64, tube_width: f64, center: Vec3) -> Self {
        let amp = current / (2.0 * PI * tube_width * tube_width);
        let inv = 0.5 / (tube_width * tube_width);
        let cutoff = gaussian_cutoff() * tube_width;
        Self {
            name: "current-loop".into(),
            rho: Arc::new(|_| 0.0),
            current: Arc::new(move |r| {
                let d = r - center;
                let rho = (d.x * d.x + d.y * d.y).sqrt();
                let dist2 = (rho - radius).powi(2) + d.z * d.z;
                if rho == 0.0 || dist2 > cutoff * cutoff {
                    return Vec3::zeros();
                }
                let mag = amp * (-dist2 * inv).exp();
                Vec3::new(-d.y / rho, d.x / rho, 0.0) * mag
            }),
            center,
            support_radius: radius + cutoff,
        }
    }

    /// Superposition of two sources.
    pub fn combined(&self, other: &ChargeCurrentDensity) -> Self {
        let (ra, rb) = (self.rho.clone(), other.rho.clone());
        let (ja, jb) = (self.current.clone(), other.current.clone());
        // smallest ball around the midpoint enclosing both
        let center = (self.center + other.center) * 0.5;
        let half = (self.center - other.center).norm() * 0.5;
        Self {
            name: format!("{}+{}", self.name, other.name),
            rho: Arc::new(move |r| ra(r) + rb(r)),
            current: Arc::new(move |r| ja(r) + jb(r)),
            center,
            support_radius: half + self.support_radius.max(other.support_radius),
        }
    }

    /// Same charge density, current replaced.
    pub fn with_current(&self, current: CurrentFn) -> Self {
        Self {
            current,
            ..self.clone()
        }
    }

    /// Largest `|rho|` and `|J|` outside the support ball relative to their
    /// peaks inside, over the sample points.
    pub fn support_leakage(&self, samples: &[Vec3]) -> f64 {
        let (mut peak_in, mut peak_out) = (0.0f64, 0.0f64);
        for r in samples {
            let m = (self.rho)(r).abs().max((self.current)(r).norm());
            if (r - self.center).norm() <= self.support_radius {
                peak_in = peak_in.max(m);
            } else {
                peak_out = peak_out.max(m);
            }
        }
        if peak_in == 0.0 {
            0.0
        } else {
            peak_out / peak_in
        }
    }

    /// Largest `|div J|` over the samples (fourth-order differences).
    pub fn max_current_divergence(&self, samples: &[Vec3], h: f64) -> f64 {
        samples
            .iter()
            .map(|r| {
                (0..3)
                    .map(|i| {
                        crate::finite_diff::derivative4(
                            |s: f64| {
                                let mut q = *r;
                                q[i] = s;
                                (self.current)(&q)[i]
                            },
                            r[i],
                            h,
                        )
                    })
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

/// How a source density is discretized into point elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceQuadrature {
    /// Midpoint rule on a uniform cube grid covering the support ball.
    Cartesian { cells_per_axis: usize },
    /// Gauss–Legendre in radius and `cos(theta)`, uniform in azimuth,
    /// around the source center.
    Spherical {
        r_min: f64,
        r_max: f64,
        radial: usize,
        polar: usize,
        azimuthal: usize,
    },
    /// Rings about the z axis through the source center: Gauss–Legendre over
    /// the radius of a disc-shaped cross-section of radius `minor_radius`
    /// centered on the ring of radius `major_radius`, uniform in both angles.
    Toroidal {
        major_radius: f64,
        minor_radius: f64,
        radial: usize,
        poloidal: usize,
        toroidal: usize,
    },
}

/// A weighted point of a discretized source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceElement {
    pub position: Vec3,
    /// `rho dV`.
    pub charge: f64,
    /// `J dV`.
    pub current: Vec3,
}

/// Discretized source: element list plus the characteristic cell size used
/// by the kernel regularization.
#[derive(Debug, Clone)]
pub struct SourceElements {
    pub elements: Vec<SourceElement>,
    pub cell_size: f64,
}

/// `1 / max(d, a)`.
#[inline]
pub fn regularized_kernel(d: f64, a: f64) -> f64 {
    1.0 / d.max(a)
}

/// `grad_r 1/max(|r - r'|, a)` given `delta = r - r'`.
#[inline]
pub fn regularized_kernel_gradient(delta: &Vec3, a: f64) -> Vec3 {
    let d = delta.norm();
    if d <= a {
        Vec3::zeros()
    } else {
        -delta / (d * d * d)
    }
}

pub fn discretize(src: &ChargeCurrentDensity, quad: &SourceQuadrature) -> Result<SourceElements> {
    let mut nodes: Vec<(Vec3, f64)> = Vec::new();
    let cell_size;
    match *quad {
        SourceQuadrature::Cartesian { cells_per_axis } => {
            if cells_per_axis < 2 {
                return Err(GaugeLabError::InvalidInput(
                    "cartesian source quadrature needs at least 2 cells per axis".into(),
                ));
            }
            let half = src.support_radius;
            let h = 2.0 * half / cells_per_axis as f64;
            let w = h * h * h;
            for k in 0..cells_per_axis {
                for j in 0..cells_per_axis {
                    for i in 0..cells_per_axis {
                        let offset = Vec3::new(
                            -half + (i as f64 + 0.5) * h,
                            -half + (j as f64 + 0.5) * h,
                            -half + (k as f64 + 0.5) * h,
                        );
                        if offset.norm() <= half + h {
                            nodes.push((src.center + offset, w));
                        }
                    }
                }
            }
            cell_size = h;
        }
        SourceQuadrature::Spherical {
            r_min,
            r_max,
            radial,
            polar,
            azimuthal,
        } => {
            if !(r_min >= 0.0 && r_max > r_min) || radial == 0 || polar == 0 || azimuthal == 0 {
                return Err(GaugeLabError::InvalidInput(
                    "invalid spherical source quadrature".into(),
                ));
            }
            let gr = GaussLegendre::new(radial);
            let gp = GaussLegendre::new(polar);
            let dphi = 2.0 * PI / azimuthal as f64;
            let span = r_max - r_min;
            let mut max_w: f64 = 0.0;
            for (&ur, &wr) in gr.nodes.iter().zip(&gr.weights) {
                let s = r_min + ur * span;
                for (&up, &wp) in gp.nodes.iter().zip(&gp.weights) {
                    let cos_t = 2.0 * up - 1.0;
                    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
                    for a in 0..azimuthal {
                        let phi = (a as f64 + 0.5) * dphi;
                        let pos = src.center
                            + Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t) * s;
                        let w = s * s * span * wr * 2.0 * wp * dphi;
                        max_w = max_w.max(w);
                        nodes.push((pos, w));
                    }
                }
            }
            cell_size = max_w.cbrt();
        }
        SourceQuadrature::Toroidal {
            major_radius,
            minor_radius,
            radial,
            poloidal,
            toroidal,
        } => {
            if !(minor_radius > 0.0 && major_radius > minor_radius)
                || radial == 0
                || poloidal == 0
                || toroidal == 0
            {
                return Err(GaugeLabError::InvalidInput(
                    "invalid toroidal source quadrature".into(),
                ));
            }
            let gr = GaussLegendre::new(radial);
            let dpol = 2.0 * PI / poloidal as f64;
            let dtor = 2.0 * PI / toroidal as f64;
            let mut max_w: f64 = 0.0;
            for (&ur, &wr) in gr.nodes.iter().zip(&gr.weights) {
                let s = ur * minor_radius;
                for p in 0..poloidal {
                    let psi = (p as f64 + 0.5) * dpol;
                    let rho = major_radius + s * psi.cos();
                    let z = s * psi.sin();
                    for k in 0..toroidal {
                        let phi = k as f64 * dtor;
                        let pos = src.center + Vec3::new(rho * phi.cos(), rho * phi.sin(), z);
                        let w = rho * s * minor_radius * wr * dpol * dtor;
                        max_w = max_w.max(w);
                        nodes.push((pos, w));
                    }
                }
            }
            cell_size = max_w.cbrt();
        }
    }

    let raw: Vec<SourceElement> = nodes
        .into_iter()
        .map(|(position, w)| SourceElement {
            position,
            charge: (src.rho)(&position) * w,
            current: (src.current)(&position) * w,
        })
        .collect();
    let peak = raw
        .iter()
        .map(|e| e.charge.abs().max(e.current.norm()))
        .fold(0.0, f64::max);
    let elements = raw
        .into_iter()
        .filter(|e| e.charge.abs().max(e.current.norm()) > SUPPORT_THRESHOLD * peak)
        .collect();
    Ok(SourceElements {
        elements,
        cell_size,
    })
}

impl SourceElements {
    /// Kernel regularization radius `h_src / 2`.
    pub fn regularization(&self) -> f64 {
        0.5 * self.cell_size
    }

    pub fn total_charge(&self) -> f64 {
        self.elements.iter().map(|e| e.charge).sum()
    }

    pub fn scalar_potential_at(&self, r: &Vec3, c: &PhysicalConstants) -> f64 {
        let a = self.regularization();
        c.coulomb_k
            * self
                .elements
                .iter()
                .map(|e| e.charge * regularized_kernel((r - e.position).norm(), a))
                .sum::<f64>()
    }

    pub fn vector_potential_at(&self, r: &Vec3, c: &PhysicalConstants) -> Vec3 {
        let a = self.regularization();
        let mut acc = Vec3::zeros();
        for e in &self.elements {
            acc += e.current * regularized_kernel((r - e.position).norm(), a);
        }
        acc * c.biot_k
    }

    pub fn electric_field_at(&self, r: &Vec3, c: &PhysicalConstants) -> Vec3 {
        let a = self.regularization();
        let mut acc = Vec3::zeros();
        for e in &self.elements {
            acc -= regularized_kernel_gradient(&(r - e.position), a) * e.charge;
        }
        acc * c.coulomb_k
    }

    pub fn magnetic_field_at(&self, r: &Vec3, c: &PhysicalConstants) -> Vec3 {
        let a = self.regularization();
        let mut acc = Vec3::zeros();
        for e in &self.elements {
            acc += regularized_kernel_gradient(&(r - e.position), a).cross(&e.current);
        }
        acc * c.biot_k
    }

    /// Time-independent potentials with analytic gradient and curl.
    pub fn potentials(self: &Arc<Self>, c: &PhysicalConstants) -> PotentialSet {
        let d = DomainBox::everywhere();
        let c = *c;
        let (s1, s2) = (self.clone(), self.clone());
        let scalar = ScalarTimeField::new("phi1", d, move |r, _| s1.scalar_potential_at(r, &c))
            .with_gradient(move |r, _| -s2.electric_field_at(r, &c))
            .with_time_derivative(|_, _| 0.0);
        let (s1, s2) = (self.clone(), self.clone());
        let vector = VectorTimeField::new("A1", d, move |r, _| s1.vector_potential_at(r, &c))
            .with_curl(move |r, _| s2.magnetic_field_at(r, &c))
            .with_time_derivative(|_, _| Vec3::zeros());
        PotentialSet::new(vector, scalar, "static-source")
    }
}

/// Electro- and magnetostatic potentials of a source by volume quadrature
/// with the regularized kernel `1/max(|r - r'|, h_src/2)`.
pub fn static_potentials(
    src: &ChargeCurrentDensity,
    quad: &SourceQuadrature,
    c: &PhysicalConstants,
) -> Result<PotentialSet> {
    let elements = Arc::new(discretize(src, quad)?);
    Ok(elements.potentials(c))
}
