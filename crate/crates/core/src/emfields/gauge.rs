//! Gauge functions `chi(r, t)` carrying analytic `grad chi` and `d chi / dt`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;

use super::field::{DomainBox, ScalarTimeField, Vec3, VectorTimeField};
use crate::finite_diff::derivative2;

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `chi(r, t) = spatial(r) + temporal(t)`, with `temporal_rate = d temporal / dt`.
#[derive(Clone)]
pub struct SeparableForm {
    pub spatial: ScalarTimeField,
    pub temporal: TimeFn,
    pub temporal_rate: TimeFn,
}

impl fmt::Debug for SeparableForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableForm")
            .field("spatial", &self.spatial.name())
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub struct GaugeFunction {
    name: String,
    chi: ScalarTimeField,
    grad: VectorTimeField,
    rate: ScalarTimeField,
    separable: Option<SeparableForm>,
}

impl GaugeFunction {
    /// General gauge function from its value, gradient and time derivative.
    pub fn new(
        name: impl Into<String>,
        chi: ScalarTimeField,
        grad: VectorTimeField,
        rate: ScalarTimeField,
    ) -> Self {
        Self {
            name: name.into(),
            chi,
            grad,
            rate,
            separable: None,
        }
    }

    /// `chi = f(r) + g(t)`. `spatial` must carry an analytic gradient, and
    /// `temporal_rate` must be the derivative of `temporal`.
    pub fn separable(
        name: impl Into<String>,
        spatial: ScalarTimeField,
        temporal: TimeFn,
        temporal_rate: TimeFn,
    ) -> Self {
        assert!(
            spatial.has_analytic_gradient(),
            "separable gauge functions need an analytic spatial gradient"
        );
        let domain = *spatial.domain();
        let (f, g) = (spatial.clone(), temporal.clone());
        let chi = ScalarTimeField::new("chi", domain, move |r, t| f.value(r, 0.0) + g(t));
        let f = spatial.clone();
        let grad = VectorTimeField::new("grad_chi", domain, move |r, _| f.gradient(r, 0.0));
        let g = temporal_rate.clone();
        let rate = ScalarTimeField::new("dchi_dt", domain, move |_, t| g(t));
        Self {
            name: name.into(),
            chi,
            grad,
            rate,
            separable: Some(SeparableForm {
                spatial,
                temporal,
                temporal_rate,
            }),
        }
    }

    /// `chi = f(r)`.
    pub fn static_spatial(name: impl Into<String>, spatial: ScalarTimeField) -> Self {
        Self::separable(name, spatial, Arc::new(|_| 0.0), Arc::new(|_| 0.0))
    }

    pub fn zero() -> Self {
        Self::static_spatial("zero", ScalarTimeField::zero(DomainBox::everywhere()))
    }

    /// `chi = c . r`.
    pub fn linear(name: impl Into<String>, c: Vec3) -> Self {
        let f = ScalarTimeField::new("c.r", DomainBox::everywhere(), move |r, _| c.dot(r))
            .with_gradient(move |_, _| c)
            .with_time_derivative(|_, _| 0.0);
        Self::static_spatial(name, f)
    }

    /// `chi = amplitude * exp(-|r - center|^2 / (2 width^2))`.
    pub fn gaussian_bump(name: impl Into<String>, amplitude: f64, width: f64, center: Vec3) -> Self {
        let inv = 1.0 / (width * width);
        let value = move |r: &Vec3| amplitude * (-0.5 * (r - center).norm_squared() * inv).exp();
        let f = ScalarTimeField::new("bump", DomainBox::everywhere(), move |r, _| value(r))
            .with_gradient(move |r, _| -(r - center) * (inv * value(r)))
            .with_time_derivative(|_, _| 0.0);
        Self::static_spatial(name, f)
    }

    /// `chi = g t`.
    pub fn uniform_rate(name: impl Into<String>, g: f64) -> Self {
        Self::separable(
            name,
            ScalarTimeField::zero(DomainBox::everywhere()),
            Arc::new(move |t| g * t),
            Arc::new(move |_| g),
        )
    }

    /// Static polynomial `sum c x^i y^j z^k`.
    pub fn polynomial(name: impl Into<String>, terms: Vec<([u32; 3], f64)>) -> Self {
        let terms = Arc::new(terms);
        let tv = terms.clone();
        let f = ScalarTimeField::new("poly", DomainBox::everywhere(), move |r, _| {
            tv.iter()
                .map(|(p, c)| c * monomial(r, p))
                .sum()
        })
        .with_gradient(move |r, _| {
            let mut g = Vec3::zeros();
            for (p, c) in terms.iter() {
                for axis in 0..3 {
                    if p[axis] == 0 {
                        continue;
                    }
                    let mut q = *p;
                    q[axis] -= 1;
                    g[axis] += c * p[axis] as f64 * monomial(r, &q);
                }
            }
            g
        })
        .with_time_derivative(|_, _| 0.0);
        Self::static_spatial(name, f)
    }

    /// `chi_a + chi_b`; separable when both are.
    pub fn sum(name: impl Into<String>, a: &GaugeFunction, b: &GaugeFunction) -> Self {
        let name = name.into();
        if let (Some(sa), Some(sb)) = (&a.separable, &b.separable) {
            let (ta, tb) = (sa.temporal.clone(), sb.temporal.clone());
            let (ra, rb) = (sa.temporal_rate.clone(), sb.temporal_rate.clone());
            return Self::separable(
                name,
                sa.spatial.sum(&sb.spatial),
                Arc::new(move |t| ta(t) + tb(t)),
                Arc::new(move |t| ra(t) + rb(t)),
            );
        }
        Self::new(name, a.chi.sum(&b.chi), a.grad.sum(&b.grad), a.rate.sum(&b.rate))
    }

    /// `-chi`.
    pub fn negated(&self) -> Self {
        let name = format!("-{}", self.name);
        if let Some(s) = &self.separable {
            let (t, r) = (s.temporal.clone(), s.temporal_rate.clone());
            return Self::separable(
                name,
                s.spatial.scaled(-1.0),
                Arc::new(move |x| -t(x)),
                Arc::new(move |x| -r(x)),
            );
        }
        Self::new(
            name,
            self.chi.scaled(-1.0),
            self.grad.scaled(-1.0),
            self.rate.scaled(-1.0),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &DomainBox {
        self.chi.domain()
    }

    #[inline]
    pub fn value(&self, r: &Vec3, t: f64) -> f64 {
        self.chi.value(r, t)
    }

    #[inline]
    pub fn gradient(&self, r: &Vec3, t: f64) -> Vec3 {
        self.grad.value(r, t)
    }

    #[inline]
    pub fn rate(&self, r: &Vec3, t: f64) -> f64 {
        self.rate.value(r, t)
    }

    pub fn chi_field(&self) -> &ScalarTimeField {
        &self.chi
    }

    pub fn gradient_field(&self) -> &VectorTimeField {
        &self.grad
    }

    pub fn rate_field(&self) -> &ScalarTimeField {
        &self.rate
    }

    pub fn separable_form(&self) -> Option<&SeparableForm> {
        self.separable.as_ref()
    }

    /// Hessian of `chi` by fourth-order differences of the analytic gradient.
    pub fn hessian(&self, r: &Vec3, t: f64) -> Matrix3<f64> {
        self.grad.jacobian(r, t)
    }

    /// Uniform (position-independent) part of `d chi / dt`, when known.
    pub fn uniform_rate_at(&self, t: f64) -> Option<f64> {
        self.separable.as_ref().map(|s| (s.temporal_rate)(t))
    }

    /// Consistency of the supplied pieces at the sample points, using
    /// second-order central differences with step `h`.
    pub fn validate(&self, samples: &[(Vec3, f64)], h: f64) -> GaugeValidation {
        let mut v = GaugeValidation::default();
        for (r, t) in samples {
            let g = self.gradient(r, *t);
            for i in 0..3 {
                let fd = derivative2(
                    |s: f64| {
                        let mut q = *r;
                        q[i] = s;
                        self.value(&q, *t)
                    },
                    r[i],
                    h,
                );
                v.gradient = v.gradient.max((g[i] - fd).abs());
            }
            let fd_t = derivative2(|s| self.value(r, s), *t, h);
            v.rate = v.rate.max((self.rate(r, *t) - fd_t).abs());

            // d_i (d_j chi) - d_j (d_i chi), and d_t (d_i chi) - d_i (d_t chi)
            let mut jac = Matrix3::zeros();
            for j in 0..3 {
                let col: Vec3 = derivative2(
                    |s: f64| {
                        let mut q = *r;
                        q[j] = s;
                        self.gradient(&q, *t)
                    },
                    r[j],
                    h,
                );
                jac.set_column(j, &col);
            }
            v.mixed = v.mixed.max((jac - jac.transpose()).amax());
            let dgrad_dt: Vec3 = derivative2(|s| self.gradient(r, s), *t, h);
            for i in 0..3 {
                let drate_di = derivative2(
                    |s: f64| {
                        let mut q = *r;
                        q[i] = s;
                        self.rate(&q, *t)
                    },
                    r[i],
                    h,
                );
                v.mixed = v.mixed.max((dgrad_dt[i] - drate_di).abs());
            }

            if let Some(s) = &self.separable {
                let direct = s.spatial.value(r, 0.0) + (s.temporal)(*t);
                let e = (self.value(r, *t) - direct).abs();
                let fd_g = derivative2(|x| (s.temporal)(x), *t, h);
                let e2 = ((s.temporal_rate)(*t) - fd_g).abs();
                v.separable = Some(v.separable.unwrap_or(0.0).max(e).max(e2));
            }
        }
        v
    }
}

fn monomial(r: &Vec3, p: &[u32; 3]) -> f64 {
    r.x.powi(p[0] as i32) * r.y.powi(p[1] as i32) * r.z.powi(p[2] as i32)
}

/// Worst-case deviations found by [`GaugeFunction::validate`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaugeValidation {
    pub gradient: f64,
    pub rate: f64,
    pub mixed: f64,
    pub separable: Option<f64>,
}

impl GaugeValidation {
    pub fn worst(&self) -> f64 {
        self.gradient
            .max(self.rate)
            .max(self.mixed)
            .max(self.separable.unwrap_or(0.0))
    }
}
