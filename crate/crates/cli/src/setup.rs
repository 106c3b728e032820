//! Physics objects for a validated config.

use std::sync::Arc;

use gauge_lab::dynamics::SeparableDrive;
use gauge_lab::emfields::{
    multipolar_potentials, ChargeCurrentDensity, DomainBox, FieldSet, PotentialSet, ScalarTimeField,
    SourceQuadrature, Vec3,
};
use gauge_lab::lattice::GridSpec;
use gauge_lab::PhysicalConstants;

use crate::catalog::{self, CatalogEntry};
use crate::config::{GridConfig, ScenarioConfig};

/// What the computed spectrum is checked against.
#[derive(Debug, Clone, Copy)]
pub(crate) enum SpectrumOracle {
    Oscillator { omega: f64 },
    Landau { b: f64, interior: f64 },
    Refinement,
}

pub(crate) struct Quantum {
    pub grid_config: GridConfig,
    pub grid: GridSpec,
    /// Static part of the Hamiltonian.
    pub p0: PotentialSet,
    pub drive: Option<SeparableDrive>,
    pub basis_size: usize,
    pub oracle: SpectrumOracle,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum SourceKind {
    Loop,
    Blob { charge: f64, center: Vec3 },
}

pub(crate) struct Source {
    pub density: ChargeCurrentDensity,
    pub quadrature: SourceQuadrature,
    pub kind: SourceKind,
    pub points: usize,
}

pub(crate) struct Setup {
    pub constants: PhysicalConstants,
    pub quantum: Option<Quantum>,
    pub source: Option<Source>,
    /// Full potentials `p0 + p1(t)` for field-level and classical checks.
    pub potentials: Option<PotentialSet>,
    /// Uniform `(E, B)` when the fields are uniform.
    pub uniform: Option<(Vec3, Vec3)>,
    pub start: (Vec3, Vec3),
}

fn dipole_drive(e0: f64, omega_d: f64) -> SeparableDrive {
    SeparableDrive {
        shape: PotentialSet::uniform_electric(Vec3::new(e0, 0.0, 0.0)),
        profile: Arc::new(move |t: f64| (omega_d * t).sin()),
    }
}

fn with_drive(p0: &PotentialSet, drive: &Option<SeparableDrive>) -> PotentialSet {
    match drive {
        Some(d) => p0.sum(&d.potentials()),
        None => p0.clone(),
    }
}

/// `phi = -k / sqrt(|r|^2 + a^2)`.
fn soft_coulomb(k: f64, a: f64) -> PotentialSet {
    let d = DomainBox::everywhere();
    let scalar = ScalarTimeField::new("soft-coulomb", d, move |r, _| -k / (r.norm_squared() + a * a).sqrt())
        .with_gradient(move |r, _| r * (k / (r.norm_squared() + a * a).powf(1.5)))
        .with_time_derivative(|_, _| 0.0);
    PotentialSet::new(gauge_lab::emfields::VectorTimeField::zero(d), scalar, "soft-coulomb")
}

/// Quartic wall `w (s - R)^4` outside planar radius `R`.
fn soft_wall(radius: f64, strength: f64) -> ScalarTimeField {
    ScalarTimeField::new("wall", DomainBox::everywhere(), move |r, _| {
        let s = r.x.hypot(r.y);
        if s > radius {
            strength * (s - radius).powi(4)
        } else {
            0.0
        }
    })
    .with_gradient(move |r, _| {
        let s = r.x.hypot(r.y);
        if s > radius {
            Vec3::new(r.x, r.y, 0.0) * (4.0 * strength * (s - radius).powi(3) / s)
        } else {
            Vec3::zeros()
        }
    })
    .with_time_derivative(|_, _| 0.0)
}

impl Setup {
    pub fn build(cfg: &ScenarioConfig) -> anyhow::Result<Setup> {
        let c: PhysicalConstants = cfg.constants.into();
        let entry: CatalogEntry = catalog::scenario_entry(&cfg.field.name)
            .ok_or_else(|| anyhow::anyhow!("unknown field `{}`", cfg.field.name))?;
        let get = |k: &str| entry.param(&cfg.field.params, k);
        let grid_config = cfg.grid.clone().or_else(|| catalog::default_grid(&cfg.field.name));
        let quantum = |p0: PotentialSet, drive: Option<SeparableDrive>, basis: f64, oracle| -> anyhow::Result<Quantum> {
            let gc = grid_config
                .clone()
                .ok_or_else(|| anyhow::anyhow!("`{}` needs a grid", cfg.field.name))?;
            Ok(Quantum {
                grid: gc.to_grid()?,
                grid_config: gc,
                p0,
                drive,
                basis_size: basis as usize,
                oracle,
            })
        };
        let none = |potentials: Option<PotentialSet>, start| Setup {
            constants: c,
            quantum: None,
            source: None,
            potentials,
            uniform: None,
            start,
        };
        let setup = match cfg.field.name.as_str() {
            "ho1d-dipole" => {
                let omega = get("omega");
                let p0 = PotentialSet::harmonic_trap(omega, c.mass, c.charge, 1);
                let drive = Some(dipole_drive(get("e0"), get("omega_d")));
                let full = with_drive(&p0, &drive);
                Setup {
                    quantum: Some(quantum(p0, drive, get("basis"), SpectrumOracle::Oscillator { omega })?),
                    ..none(Some(full), (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.3, 0.1)))
                }
            }
            "coulomb-soft" => {
                let p0 = soft_coulomb(get("k"), get("softening"));
                let drive = Some(dipole_drive(get("e0"), get("omega_d")));
                let full = with_drive(&p0, &drive);
                Setup {
                    quantum: Some(quantum(p0, drive, get("basis"), SpectrumOracle::Refinement)?),
                    ..none(Some(full), (Vec3::new(1.0, 0.2, 0.0), Vec3::new(0.0, 0.3, 0.1)))
                }
            }
            "landau2d" => {
                let b = Vec3::new(0.0, 0.0, get("b"));
                let radius = get("wall_radius");
                let a = multipolar_potentials(&FieldSet::uniform(Vec3::zeros(), b), Vec3::zeros());
                let p0 = PotentialSet::new(a.vector, soft_wall(radius, get("wall_strength")), "landau");
                let oracle = SpectrumOracle::Landau {
                    b: b.z,
                    interior: radius * 3.5 / 4.5,
                };
                Setup {
                    quantum: Some(quantum(p0.clone(), None, get("states"), oracle)?),
                    uniform: Some((Vec3::zeros(), b)),
                    ..none(Some(p0), (Vec3::new(0.5, 0.1, 0.0), Vec3::new(0.3, 0.4, 0.0)))
                }
            }
            "uniformB-multipolar" => {
                let b = Vec3::new(get("bx"), get("by"), get("bz"));
                let e = Vec3::new(get("ex"), get("ey"), get("ez"));
                let p = multipolar_potentials(&FieldSet::uniform(e, b), Vec3::zeros());
                Setup {
                    uniform: Some((e, b)),
                    ..none(Some(p), (Vec3::new(0.5, 0.1, 0.0), Vec3::new(0.3, 0.4, -0.1)))
                }
            }
            "current-loop" => {
                let center = Vec3::new(get("center_x"), get("center_y"), get("center_z"));
                let radius = get("radius");
                let density = ChargeCurrentDensity::current_loop(get("current"), radius, get("tube"), center);
                let quadrature = SourceQuadrature::Toroidal {
                    major_radius: radius,
                    minor_radius: density.support_radius - radius,
                    radial: 6,
                    poloidal: 8,
                    toroidal: get("toroidal") as usize,
                };
                Setup {
                    source: Some(Source {
                        density,
                        quadrature,
                        kind: SourceKind::Loop,
                        points: get("points") as usize,
                    }),
                    ..none(None, (Vec3::zeros(), Vec3::zeros()))
                }
            }
            "gaussian-blob" => {
                let center = Vec3::new(get("center_x"), get("center_y"), get("center_z"));
                let charge = get("charge");
                let density = ChargeCurrentDensity::gaussian_charge(charge, center, get("width"));
                let quadrature = SourceQuadrature::Spherical {
                    r_min: 0.0,
                    r_max: density.support_radius,
                    radial: 24,
                    polar: 16,
                    azimuthal: 32,
                };
                Setup {
                    source: Some(Source {
                        density,
                        quadrature,
                        kind: SourceKind::Blob { charge, center },
                        points: get("points") as usize,
                    }),
                    ..none(None, (Vec3::zeros(), Vec3::zeros()))
                }
            }
            other => anyhow::bail!("field `{other}` has no setup"),
        };
        Ok(setup)
    }
}
