use nalgebra::Matrix3;

use super::field::{DomainBox, ScalarTimeField, Vec3, VectorTimeField};
use super::gauge::GaugeFunction;
use crate::error::{GaugeLabError, Result};

/// Vector and scalar potential in some gauge.
#[derive(Clone, Debug)]
pub struct PotentialSet {
    pub vector: VectorTimeField,
    pub scalar: ScalarTimeField,
    pub label: String,
}

/// Electric and magnetic field.
#[derive(Clone, Debug)]
pub struct FieldSet {
    pub electric: VectorTimeField,
    pub magnetic: VectorTimeField,
}

impl PotentialSet {
    pub fn new(vector: VectorTimeField, scalar: ScalarTimeField, label: impl Into<String>) -> Self {
        Self {
            vector,
            scalar,
            label: label.into(),
        }
    }

    pub fn zero(domain: DomainBox) -> Self {
        Self::new(
            VectorTimeField::zero(domain),
            ScalarTimeField::zero(domain),
            "zero",
        )
    }

    pub fn domain(&self) -> DomainBox {
        self.vector
            .domain()
            .intersection(self.scalar.domain())
            .unwrap_or(*self.scalar.domain())
    }

    /// `(A + A', phi + phi')`.
    pub fn sum(&self, other: &PotentialSet) -> PotentialSet {
        PotentialSet::new(
            self.vector.sum(&other.vector),
            self.scalar.sum(&other.scalar),
            format!("{}+{}", self.label, other.label),
        )
    }

    pub fn scaled(&self, k: f64) -> PotentialSet {
        PotentialSet::new(
            self.vector.scaled(k),
            self.scalar.scaled(k),
            format!("{k}*{}", self.label),
        )
    }

    /// Uniform electric field: `phi = -E0 . r`, `A = 0`.
    pub fn uniform_electric(e0: Vec3) -> Self {
        let d = DomainBox::everywhere();
        let scalar = ScalarTimeField::new("-E0.r", d, move |r, _| -e0.dot(r))
            .with_gradient(move |_, _| -e0)
            .with_time_derivative(|_, _| 0.0);
        Self::new(VectorTimeField::zero(d), scalar, "uniform-E")
    }

    /// Uniform magnetic field in the symmetric gauge `A = -r x B0 / 2`.
    pub fn symmetric_gauge(b0: Vec3) -> Self {
        let d = DomainBox::everywhere();
        // d A_i / d x_j for A = (B0 x r)/2
        let jac = Matrix3::new(
            0.0, -b0.z, b0.y, //
            b0.z, 0.0, -b0.x, //
            -b0.y, b0.x, 0.0,
        ) * 0.5;
        let vector = VectorTimeField::new("-r x B0/2", d, move |r, _| -r.cross(&b0) * 0.5)
            .with_curl(move |_, _| b0)
            .with_divergence(|_, _| 0.0)
            .with_jacobian(move |_, _| jac)
            .with_time_derivative(|_, _| Vec3::zeros());
        Self::new(vector, ScalarTimeField::zero(d), "symmetric-gauge")
    }

    /// Isotropic harmonic trap over the first `dims` coordinates:
    /// `e phi = m omega^2 |r_dims|^2 / 2`.
    pub fn harmonic_trap(omega: f64, mass: f64, charge: f64, dims: usize) -> Self {
        let k = mass * omega * omega / charge;
        let mask = Vec3::from_fn(|i, _| if i < dims { 1.0 } else { 0.0 });
        let scalar = ScalarTimeField::new(
            "harmonic",
            DomainBox::everywhere(),
            move |r, _| 0.5 * k * r.component_mul(&mask).norm_squared(),
        )
        .with_gradient(move |r, _| r.component_mul(&mask) * k)
        .with_time_derivative(|_, _| 0.0);
        Self::new(VectorTimeField::zero(DomainBox::everywhere()), scalar, "harmonic")
    }
}

impl FieldSet {
    pub fn new(electric: VectorTimeField, magnetic: VectorTimeField) -> Self {
        Self { electric, magnetic }
    }

    pub fn uniform(e0: Vec3, b0: Vec3) -> Self {
        let d = DomainBox::everywhere();
        Self::new(
            VectorTimeField::constant("E0", e0, d),
            VectorTimeField::constant("B0", b0, d),
        )
    }

    pub fn domain(&self) -> DomainBox {
        self.electric
            .domain()
            .intersection(self.magnetic.domain())
            .unwrap_or(*self.electric.domain())
    }

    /// Largest `|div B|` over the samples.
    pub fn max_magnetic_divergence(&self, samples: &[(Vec3, f64)]) -> f64 {
        samples
            .iter()
            .map(|(r, t)| self.magnetic.divergence(r, *t).abs())
            .fold(0.0, f64::max)
    }
}

/// `(A + grad chi, phi - d chi/dt)`.
///
/// The transformed potentials carry no analytic derivatives, so any field
/// derived from them goes through finite differences.
pub fn apply_gauge_transform(p: &PotentialSet, chi: &GaugeFunction) -> Result<PotentialSet> {
    let domain = p.domain();
    if !chi.domain().contains_box(&domain) {
        return Err(GaugeLabError::DomainMismatch(format!(
            "gauge function `{}` does not cover the domain of potentials `{}`",
            chi.name(),
            p.label
        )));
    }
    let (a, g) = (p.vector.clone(), chi.clone());
    let vector = VectorTimeField::new(format!("{}+grad({})", a.name(), chi.name()), domain, move |r, t| {
        a.value(r, t) + g.gradient(r, t)
    });
    let (phi, g) = (p.scalar.clone(), chi.clone());
    let scalar = ScalarTimeField::new(format!("{}-dt({})", phi.name(), chi.name()), domain, move |r, t| {
        phi.value(r, t) - g.rate(r, t)
    });
    Ok(PotentialSet::new(
        vector,
        scalar,
        format!("{}|{}", p.label, chi.name()),
    ))
}

/// `E = -grad phi - dA/dt`, `B = curl A`.
pub fn derive_fields(p: &PotentialSet) -> FieldSet {
    let domain = p.domain();
    let (a, phi) = (p.vector.clone(), p.scalar.clone());
    let electric = VectorTimeField::new("E", domain, move |r, t| {
        -phi.gradient(r, t) - a.time_derivative(r, t)
    });
    let a = p.vector.clone();
    let magnetic = VectorTimeField::new("B", domain, move |r, t| a.curl(r, t));
    FieldSet::new(electric, magnetic)
}
