//! Analytic scalar and vector fields of position and time.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{point_array, GaugeLabError, Result};
use crate::finite_diff::{derivative2, derivative4, FD_STEP};

pub type Vec3 = Vector3<f64>;
pub type ScalarFn = Arc<dyn Fn(&Vec3, f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Vec3, f64) -> Vec3 + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&Vec3, f64) -> Matrix3<f64> + Send + Sync>;

/// Axis-aligned validity box. Evaluation outside it is an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBox {
    pub min: Vec3,
    pub max: Vec3,
}

impl DomainBox {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        if (0..3).any(|i| !(min[i] <= max[i]) || min[i].is_nan() || max[i].is_nan()) {
            return Err(GaugeLabError::InvalidInput(format!(
                "domain box min {min:?} is not below max {max:?}"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn everywhere() -> Self {
        Self {
            min: Vec3::repeat(f64::NEG_INFINITY),
            max: Vec3::repeat(f64::INFINITY),
        }
    }

    /// `[-half, half]^3`.
    pub fn cube(half: f64) -> Self {
        Self {
            min: Vec3::repeat(-half),
            max: Vec3::repeat(half),
        }
    }

    pub fn contains(&self, r: &Vec3) -> bool {
        (0..3).all(|i| r[i] >= self.min[i] && r[i] <= self.max[i])
    }

    pub fn contains_box(&self, other: &DomainBox) -> bool {
        (0..3).all(|i| other.min[i] >= self.min[i] && other.max[i] <= self.max[i])
    }

    pub fn intersection(&self, other: &DomainBox) -> Option<DomainBox> {
        let min = self.min.sup(&other.min);
        let max = self.max.inf(&other.max);
        DomainBox::new(min, max).ok()
    }
}

fn fd_gradient(f: &ScalarFn, r: &Vec3, t: f64) -> Vec3 {
    Vec3::from_fn(|i, _| {
        derivative4(
            |s: f64| {
                let mut q = *r;
                q[i] = s;
                f(&q, t)
            },
            r[i],
            FD_STEP,
        )
    })
}

fn fd_jacobian(f: &VectorFn, r: &Vec3, t: f64) -> Matrix3<f64> {
    let mut jac = Matrix3::zeros();
    for j in 0..3 {
        let col: Vec3 = derivative4(
            |s: f64| {
                let mut q = *r;
                q[j] = s;
                f(&q, t)
            },
            r[j],
            FD_STEP,
        );
        jac.set_column(j, &col);
    }
    jac
}

/// Scalar field `s(r, t)` with optional analytic derivatives.
#[derive(Clone)]
pub struct ScalarTimeField {
    name: String,
    domain: DomainBox,
    value: ScalarFn,
    gradient: Option<VectorFn>,
    time_derivative: Option<ScalarFn>,
}

impl fmt::Debug for ScalarTimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarTimeField")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("analytic_gradient", &self.gradient.is_some())
            .field("analytic_time_derivative", &self.time_derivative.is_some())
            .finish()
    }
}

impl ScalarTimeField {
    pub fn new<F>(name: impl Into<String>, domain: DomainBox, f: F) -> Self
    where
        F: Fn(&Vec3, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            value: Arc::new(f),
            gradient: None,
            time_derivative: None,
        }
    }

    pub fn with_gradient<F>(mut self, g: F) -> Self
    where
        F: Fn(&Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_time_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(&Vec3, f64) -> f64 + Send + Sync + 'static,
    {
        self.time_derivative = Some(Arc::new(d));
        self
    }

    pub fn zero(domain: DomainBox) -> Self {
        Self::constant("zero", 0.0, domain)
    }

    pub fn constant(name: impl Into<String>, c: f64, domain: DomainBox) -> Self {
        Self::new(name, domain, move |_, _| c)
            .with_gradient(|_, _| Vec3::zeros())
            .with_time_derivative(|_, _| 0.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    /// Unchecked evaluation; callers validate the domain up front.
    #[inline]
    pub fn value(&self, r: &Vec3, t: f64) -> f64 {
        (self.value)(r, t)
    }

    pub fn eval(&self, r: &Vec3, t: f64) -> Result<f64> {
        if !self.domain.contains(r) {
            return Err(GaugeLabError::OutsideDomain {
                field: self.name.clone(),
                point: point_array(r),
            });
        }
        Ok(self.value(r, t))
    }

    pub fn gradient(&self, r: &Vec3, t: f64) -> Vec3 {
        match &self.gradient {
            Some(g) => g(r, t),
            None => fd_gradient(&self.value, r, t),
        }
    }

    pub fn time_derivative(&self, r: &Vec3, t: f64) -> f64 {
        match &self.time_derivative {
            Some(d) => d(r, t),
            None => derivative4(|s| (self.value)(r, s), t, FD_STEP),
        }
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_analytic_time_derivative(&self) -> bool {
        self.time_derivative.is_some()
    }

    /// Pointwise sum; analytic derivatives survive when both operands carry them.
    pub fn sum(&self, other: &ScalarTimeField) -> ScalarTimeField {
        let (a, b) = (self.value.clone(), other.value.clone());
        let domain = self
            .domain
            .intersection(&other.domain)
            .unwrap_or(self.domain);
        let mut out = Self::new(
            format!("{}+{}", self.name, other.name),
            domain,
            move |r, t| a(r, t) + b(r, t),
        );
        if let (Some(ga), Some(gb)) = (self.gradient.clone(), other.gradient.clone()) {
            out.gradient = Some(Arc::new(move |r, t| ga(r, t) + gb(r, t)));
        }
        if let (Some(da), Some(db)) = (self.time_derivative.clone(), other.time_derivative.clone())
        {
            out.time_derivative = Some(Arc::new(move |r, t| da(r, t) + db(r, t)));
        }
        out
    }

    pub fn scaled(&self, k: f64) -> ScalarTimeField {
        let a = self.value.clone();
        let mut out = Self::new(format!("{k}*{}", self.name), self.domain, move |r, t| {
            k * a(r, t)
        });
        if let Some(g) = self.gradient.clone() {
            out.gradient = Some(Arc::new(move |r, t| g(r, t) * k));
        }
        if let Some(d) = self.time_derivative.clone() {
            out.time_derivative = Some(Arc::new(move |r, t| k * d(r, t)));
        }
        out
    }

    /// Largest deviation of the analytic derivatives from second-order
    /// central differences with step `h`, over the given `(r, t)` samples.
    pub fn check_derivatives(&self, samples: &[(Vec3, f64)], h: f64) -> DerivativeCheck {
        let mut check = DerivativeCheck::default();
        for (r, t) in samples {
            if let Some(g) = &self.gradient {
                let analytic = g(r, *t);
                for i in 0..3 {
                    let fd = derivative2(
                        |s: f64| {
                            let mut q = *r;
                            q[i] = s;
                            (self.value)(&q, *t)
                        },
                        r[i],
                        h,
                    );
                    check.bump_spatial((analytic[i] - fd).abs());
                }
            }
            if let Some(d) = &self.time_derivative {
                let fd = derivative2(|s| (self.value)(r, s), *t, h);
                check.bump_time((d(r, *t) - fd).abs());
            }
        }
        check
    }

}

/// Outcome of comparing analytic derivatives against finite differences.
/// `None` means no analytic derivative was supplied.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DerivativeCheck {
    pub spatial: Option<f64>,
    pub time: Option<f64>,
}

impl DerivativeCheck {
    fn bump_spatial(&mut self, e: f64) {
        self.spatial = Some(self.spatial.map_or(e, |v| v.max(e)));
    }
    fn bump_time(&mut self, e: f64) {
        self.time = Some(self.time.map_or(e, |v| v.max(e)));
    }
    pub fn worst(&self) -> f64 {
        self.spatial.unwrap_or(0.0).max(self.time.unwrap_or(0.0))
    }
}

/// Vector field `v(r, t)` with optional analytic curl, divergence, Jacobian
/// and time derivative.
#[derive(Clone)]
pub struct VectorTimeField {
    name: String,
    domain: DomainBox,
    value: VectorFn,
    curl: Option<VectorFn>,
    divergence: Option<ScalarFn>,
    jacobian: Option<MatrixFn>,
    time_derivative: Option<VectorFn>,
}

impl fmt::Debug for VectorTimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorTimeField")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("analytic_curl", &self.curl.is_some())
            .field("analytic_divergence", &self.divergence.is_some())
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("analytic_time_derivative", &self.time_derivative.is_some())
            .finish()
    }
}

impl VectorTimeField {
    pub fn new<F>(name: impl Into<String>, domain: DomainBox, f: F) -> Self
    where
        F: Fn(&Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            value: Arc::new(f),
            curl: None,
            divergence: None,
            jacobian: None,
            time_derivative: None,
        }
    }

    pub fn with_curl<F>(mut self, c: F) -> Self
    where
        F: Fn(&Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        self.curl = Some(Arc::new(c));
        self
    }

    pub fn with_divergence<F>(mut self, d: F) -> Self
    where
        F: Fn(&Vec3, f64) -> f64 + Send + Sync + 'static,
    {
        self.divergence = Some(Arc::new(d));
        self
    }

    /// `J[(i, j)] = d v_i / d x_j`.
    pub fn with_jacobian<F>(mut self, j: F) -> Self
    where
        F: Fn(&Vec3, f64) -> Matrix3<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn with_time_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(&Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        self.time_derivative = Some(Arc::new(d));
        self
    }

    pub fn zero(domain: DomainBox) -> Self {
        Self::constant("zero", Vec3::zeros(), domain)
    }

    pub fn constant(name: impl Into<String>, v: Vec3, domain: DomainBox) -> Self {
        Self::new(name, domain, move |_, _| v)
            .with_curl(|_, _| Vec3::zeros())
            .with_divergence(|_, _| 0.0)
            .with_jacobian(|_, _| Matrix3::zeros())
            .with_time_derivative(|_, _| Vec3::zeros())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    #[inline]
    pub fn value(&self, r: &Vec3, t: f64) -> Vec3 {
        (self.value)(r, t)
    }

    pub fn eval(&self, r: &Vec3, t: f64) -> Result<Vec3> {
        if !self.domain.contains(r) {
            return Err(GaugeLabError::OutsideDomain {
                field: self.name.clone(),
                point: point_array(r),
            });
        }
        Ok(self.value(r, t))
    }

    pub fn jacobian(&self, r: &Vec3, t: f64) -> Matrix3<f64> {
        match &self.jacobian {
            Some(j) => j(r, t),
            None => fd_jacobian(&self.value, r, t),
        }
    }

    pub fn curl(&self, r: &Vec3, t: f64) -> Vec3 {
        match &self.curl {
            Some(c) => c(r, t),
            None => {
                let j = self.jacobian(r, t);
                Vec3::new(
                    j[(2, 1)] - j[(1, 2)],
                    j[(0, 2)] - j[(2, 0)],
                    j[(1, 0)] - j[(0, 1)],
                )
            }
        }
    }

    pub fn divergence(&self, r: &Vec3, t: f64) -> f64 {
        match &self.divergence {
            Some(d) => d(r, t),
            None => self.jacobian(r, t).trace(),
        }
    }

    pub fn time_derivative(&self, r: &Vec3, t: f64) -> Vec3 {
        match &self.time_derivative {
            Some(d) => d(r, t),
            None => derivative4(|s| (self.value)(r, s), t, FD_STEP),
        }
    }

    pub fn has_analytic_curl(&self) -> bool {
        self.curl.is_some()
    }

    pub fn has_analytic_divergence(&self) -> bool {
        self.divergence.is_some()
    }

    pub fn has_analytic_time_derivative(&self) -> bool {
        self.time_derivative.is_some()
    }

    pub fn sum(&self, other: &VectorTimeField) -> VectorTimeField {
        let (a, b) = (self.value.clone(), other.value.clone());
        let domain = self
            .domain
            .intersection(&other.domain)
            .unwrap_or(self.domain);
        let mut out = Self::new(
            format!("{}+{}", self.name, other.name),
            domain,
            move |r, t| a(r, t) + b(r, t),
        );
        if let (Some(x), Some(y)) = (self.curl.clone(), other.curl.clone()) {
            out.curl = Some(Arc::new(move |r, t| x(r, t) + y(r, t)));
        }
        if let (Some(x), Some(y)) = (self.divergence.clone(), other.divergence.clone()) {
            out.divergence = Some(Arc::new(move |r, t| x(r, t) + y(r, t)));
        }
        if let (Some(x), Some(y)) = (self.jacobian.clone(), other.jacobian.clone()) {
            out.jacobian = Some(Arc::new(move |r, t| x(r, t) + y(r, t)));
        }
        if let (Some(x), Some(y)) = (self.time_derivative.clone(), other.time_derivative.clone()) {
            out.time_derivative = Some(Arc::new(move |r, t| x(r, t) + y(r, t)));
        }
        out
    }

    pub fn scaled(&self, k: f64) -> VectorTimeField {
        let a = self.value.clone();
        let mut out = Self::new(format!("{k}*{}", self.name), self.domain, move |r, t| {
            a(r, t) * k
        });
        if let Some(x) = self.curl.clone() {
            out.curl = Some(Arc::new(move |r, t| x(r, t) * k));
        }
        if let Some(x) = self.divergence.clone() {
            out.divergence = Some(Arc::new(move |r, t| k * x(r, t)));
        }
        if let Some(x) = self.jacobian.clone() {
            out.jacobian = Some(Arc::new(move |r, t| x(r, t) * k));
        }
        if let Some(x) = self.time_derivative.clone() {
            out.time_derivative = Some(Arc::new(move |r, t| x(r, t) * k));
        }
        out
    }

    /// Analytic curl/divergence/Jacobian/time derivative against
    /// second-order central differences.
    pub fn check_derivatives(&self, samples: &[(Vec3, f64)], h: f64) -> DerivativeCheck {
        let mut check = DerivativeCheck::default();
        for (r, t) in samples {
            let fd_jac = {
                let mut jac = Matrix3::zeros();
                for j in 0..3 {
                    let col: Vec3 = derivative2(
                        |s: f64| {
                            let mut q = *r;
                            q[j] = s;
                            (self.value)(&q, *t)
                        },
                        r[j],
                        h,
                    );
                    jac.set_column(j, &col);
                }
                jac
            };
            if let Some(j) = &self.jacobian {
                check.bump_spatial((j(r, *t) - fd_jac).amax());
            }
            if let Some(c) = &self.curl {
                let fd = Vec3::new(
                    fd_jac[(2, 1)] - fd_jac[(1, 2)],
                    fd_jac[(0, 2)] - fd_jac[(2, 0)],
                    fd_jac[(1, 0)] - fd_jac[(0, 1)],
                );
                check.bump_spatial((c(r, *t) - fd).amax());
            }
            if let Some(d) = &self.divergence {
                check.bump_spatial((d(r, *t) - fd_jac.trace()).abs());
            }
            if let Some(d) = &self.time_derivative {
                let fd: Vec3 = derivative2(|s| (self.value)(r, s), *t, h);
                check.bump_time((d(r, *t) - fd).amax());
            }
        }
        check
    }

}
