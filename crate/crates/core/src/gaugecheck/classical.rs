use crate::constants::PhysicalConstants;
use crate::emfields::{FieldSet, GaugeFunction, PotentialSet, Vec3};
use crate::error::{GaugeLabError, Result};

/// Sampled classical path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    /// Canonical momenta, for the Hamiltonian integrator only.
    pub canonical_momenta: Option<Vec<Vec3>>,
    /// Set when the path left the field domain; the path stops at the last
    /// point inside.
    pub exited: bool,
}

fn step_count(t_span: (f64, f64), dt: f64) -> Result<(usize, f64)> {
    let (t0, t1) = t_span;
    if !(dt > 0.0) || !(t1 >= t0) {
        return Err(GaugeLabError::InvalidInput(format!(
            "bad time stepping: dt = {dt}, span [{t0}, {t1}]"
        )));
    }
    let n = ((t1 - t0) / dt).round() as usize;
    Ok((n, if n == 0 { 0.0 } else { (t1 - t0) / n as f64 }))
}

/// Classical RK4 on a pair of vectors.
fn rk4<F>(y: (Vec3, Vec3), t: f64, dt: f64, f: F) -> (Vec3, Vec3)
where
    F: Fn(f64, &Vec3, &Vec3) -> (Vec3, Vec3),
{
    let (a, b) = y;
    let k1 = f(t, &a, &b);
    let k2 = f(t + 0.5 * dt, &(a + k1.0 * (0.5 * dt)), &(b + k1.1 * (0.5 * dt)));
    let k3 = f(t + 0.5 * dt, &(a + k2.0 * (0.5 * dt)), &(b + k2.1 * (0.5 * dt)));
    let k4 = f(t + dt, &(a + k3.0 * dt), &(b + k3.1 * dt));
    (
        a + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (dt / 6.0),
        b + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * (dt / 6.0),
    )
}

/// RK4 on `m dv/dt = e (E + v x B)`.
pub fn classical_trajectory(
    f: &FieldSet,
    r0: Vec3,
    v0: Vec3,
    t_span: (f64, f64),
    dt: f64,
    c: &PhysicalConstants,
) -> Result<Trajectory> {
    let (steps, dt) = step_count(t_span, dt)?;
    let domain = f.domain();
    if !domain.contains(&r0) {
        return Err(GaugeLabError::OutsideDomain {
            field: "lorentz force".into(),
            point: [r0.x, r0.y, r0.z],
        });
    }
    let q = c.charge / c.mass;
    let rhs = |t: f64, r: &Vec3, v: &Vec3| (*v, (f.electric.value(r, t) + v.cross(&f.magnetic.value(r, t))) * q);
    let mut out = Trajectory {
        times: vec![t_span.0],
        positions: vec![r0],
        velocities: vec![v0],
        canonical_momenta: None,
        exited: false,
    };
    let mut y = (r0, v0);
    for k in 0..steps {
        let t = t_span.0 + k as f64 * dt;
        y = rk4(y, t, dt, rhs);
        if !domain.contains(&y.0) {
            out.exited = true;
            break;
        }
        out.times.push(t_span.0 + (k + 1) as f64 * dt);
        out.positions.push(y.0);
        out.velocities.push(y.1);
    }
    Ok(out)
}

/// RK4 on Hamilton's equations of
/// `H = |p - e(A + grad chi)|^2 / 2m + e(phi - d chi/dt)`,
/// starting from `p(0) = m v0 + e(A + grad chi)(r0, t0)`.
pub fn hamilton_equations_trajectory(
    p: &PotentialSet,
    chi: &GaugeFunction,
    r0: Vec3,
    v0: Vec3,
    t_span: (f64, f64),
    dt: f64,
    c: &PhysicalConstants,
) -> Result<Trajectory> {
    let (steps, dt) = step_count(t_span, dt)?;
    let domain = p.domain().intersection(chi.domain()).ok_or_else(|| {
        GaugeLabError::DomainMismatch(format!(
            "potentials `{}` and gauge `{}` share no domain",
            p.label,
            chi.name()
        ))
    })?;
    if !domain.contains(&r0) {
        return Err(GaugeLabError::OutsideDomain {
            field: p.label.clone(),
            point: [r0.x, r0.y, r0.z],
        });
    }
    let (e, m) = (c.charge, c.mass);
    let vector = |r: &Vec3, t: f64| p.vector.value(r, t) + chi.gradient(r, t);
    let velocity = |r: &Vec3, t: f64, pc: &Vec3| (pc - vector(r, t) * e) / m;
    let rhs = |t: f64, r: &Vec3, pc: &Vec3| {
        let v = velocity(r, t, pc);
        // J[(i, j)] = d(A + grad chi)_i / dx_j
        let jac = p.vector.jacobian(r, t) + chi.hessian(r, t);
        let grad_scalar = p.scalar.gradient(r, t) - chi.rate_field().gradient(r, t);
        (v, (jac.transpose() * v - grad_scalar) * e)
    };
    let t0 = t_span.0;
    let pc0 = v0 * m + vector(&r0, t0) * e;
    let mut out = Trajectory {
        times: vec![t0],
        positions: vec![r0],
        velocities: vec![v0],
        canonical_momenta: Some(vec![pc0]),
        exited: false,
    };
    let mut y = (r0, pc0);
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        y = rk4(y, t, dt, rhs);
        if !domain.contains(&y.0) {
            out.exited = true;
            break;
        }
        let t_next = t0 + (k + 1) as f64 * dt;
        out.times.push(t_next);
        out.positions.push(y.0);
        out.velocities.push(velocity(&y.0, t_next, &y.1));
        if let Some(ps) = out.canonical_momenta.as_mut() {
            ps.push(y.1);
        }
    }
    Ok(out)
}
