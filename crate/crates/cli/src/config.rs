//! Scenario configuration as read from JSON.

use std::collections::BTreeMap;

use gauge_lab::lattice::{Axis, GridSpec};
use gauge_lab::PhysicalConstants;
use serde::{Deserialize, Serialize};

use crate::catalog;

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("invalid config: {0}")]
pub struct ValidationError(pub String);

/// A catalog entry by name, with parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

impl Selection {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: Params::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    EigenvalueShift,
    AmplitudePropagation,
    PdePropagation,
    GaugeSuite,
    Appendix1,
    Appendix2,
    Classical,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Spectrum,
        Experiment::EigenvalueShift,
        Experiment::AmplitudePropagation,
        Experiment::PdePropagation,
        Experiment::GaugeSuite,
        Experiment::Appendix1,
        Experiment::Appendix2,
        Experiment::Classical,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::EigenvalueShift => "eigenvalue-shift",
            Experiment::AmplitudePropagation => "amplitude-propagation",
            Experiment::PdePropagation => "pde-propagation",
            Experiment::GaugeSuite => "gauge-suite",
            Experiment::Appendix1 => "appendix1",
            Experiment::Appendix2 => "appendix2",
            Experiment::Classical => "classical",
        }
    }
}

/// Square grid: `points` interior nodes per axis on `(min, max)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub dims: usize,
}

impl GridConfig {
    pub fn to_grid(&self) -> gauge_lab::Result<GridSpec> {
        GridSpec::new(vec![Axis::new(self.min, self.max, self.points); self.dims])
    }

    pub fn with_points(&self, points: usize) -> Self {
        Self {
            points,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub hbar: f64,
    pub charge: f64,
    pub mass: f64,
    pub coulomb_k: f64,
    pub biot_k: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        PhysicalConstants::default().into()
    }
}

impl From<PhysicalConstants> for ConstantsConfig {
    fn from(c: PhysicalConstants) -> Self {
        Self {
            hbar: c.hbar,
            charge: c.charge,
            mass: c.mass,
            coulomb_k: c.coulomb_k,
            biot_k: c.biot_k,
        }
    }
}

impl From<ConstantsConfig> for PhysicalConstants {
    fn from(c: ConstantsConfig) -> Self {
        PhysicalConstants {
            hbar: c.hbar,
            charge: c.charge,
            mass: c.mass,
            coulomb_k: c.coulomb_k,
            biot_k: c.biot_k,
        }
    }
}

/// Pass thresholds. Every record compares a nonnegative residual against
/// one of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Identities that hold to round-off.
    pub exact: f64,
    /// Gauge independence of amplitudes and trajectories.
    pub invariance: f64,
    /// Fields derived by finite differences in two gauges.
    pub fields: f64,
    /// Fields rebuilt from multipolar potentials.
    pub reconstruction: f64,
    /// Relative error of low levels against closed forms.
    pub spectrum: f64,
    /// Relative error of the Landau spacing.
    pub landau: f64,
    /// `C` in the `C h^2` bound on discretization errors.
    pub h2_constant: f64,
    /// Allowed shortfall of an observed order below 2.
    pub order_slack: f64,
    /// Covariant residual over the canonical-momentum residual.
    pub control_ratio: f64,
    pub norm_drift: f64,
    pub density: f64,
    /// Agreement of independent numerical routes.
    pub cross_method: f64,
    pub residual_a: f64,
    pub residual_phi: f64,
    /// Relative agreement of the two routes to `f(r)`.
    pub closed_form: f64,
    /// Relative error of `g` against the shell theorem.
    pub shell: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-10,
            invariance: 1e-6,
            fields: 1e-8,
            reconstruction: 1e-6,
            spectrum: 1e-4,
            landau: 0.02,
            h2_constant: 1.0,
            order_slack: 0.1,
            control_ratio: 0.1,
            norm_drift: 1e-8,
            density: 1e-12,
            cross_method: 1e-3,
            residual_a: 1e-4,
            residual_phi: 1e-5,
            closed_form: 1e-6,
            shell: 1e-4,
        }
    }
}

impl Tolerances {
    fn all(&self) -> [(&'static str, f64); 16] {
        [
            ("exact", self.exact),
            ("invariance", self.invariance),
            ("fields", self.fields),
            ("reconstruction", self.reconstruction),
            ("spectrum", self.spectrum),
            ("landau", self.landau),
            ("h2_constant", self.h2_constant),
            ("order_slack", self.order_slack),
            ("control_ratio", self.control_ratio),
            ("norm_drift", self.norm_drift),
            ("density", self.density),
            ("cross_method", self.cross_method),
            ("residual_a", self.residual_a),
            ("residual_phi", self.residual_phi),
            ("closed_form", self.closed_form),
            ("shell", self.shell),
        ]
    }

    /// Every tolerance multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            exact: self.exact * k,
            invariance: self.invariance * k,
            fields: self.fields * k,
            reconstruction: self.reconstruction * k,
            spectrum: self.spectrum * k,
            landau: self.landau * k,
            h2_constant: self.h2_constant * k,
            order_slack: self.order_slack * k,
            control_ratio: self.control_ratio * k,
            norm_drift: self.norm_drift * k,
            density: self.density * k,
            cross_method: self.cross_method * k,
            residual_a: self.residual_a * k,
            residual_phi: self.residual_phi * k,
            closed_form: self.closed_form * k,
            shell: self.shell * k,
        }
    }
}

/// Uniform output times `t_end / outputs, ..., t_end`, stepped by `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt: f64,
    pub outputs: usize,
}

impl TimeGrid {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Steps between recorded outputs.
    pub fn stride(&self) -> usize {
        (self.steps() / self.outputs).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Field or source from the scenario catalog.
    pub field: Selection,
    /// Defaults to the catalog grid of the field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub gauges: Vec<Selection>,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Defaults to the catalog time grid of the field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks names, parameters, tolerances and the time grid without
    /// running anything.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let bad = |m: String| Err(ValidationError(m));
        let entry = catalog::scenario_entry(&self.field.name)
            .ok_or_else(|| ValidationError(format!("unknown field `{}`", self.field.name)))?;
        entry.check_params(&self.field.params).map_err(ValidationError)?;
        for g in &self.gauges {
            let e = catalog::gauge_entry(&g.name)
                .ok_or_else(|| ValidationError(format!("unknown gauge `{}`", g.name)))?;
            e.check_params(&g.params).map_err(ValidationError)?;
        }
        for (name, v) in self.tolerances.all() {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("tolerance `{name}` must be positive, got {v}"));
            }
        }
        if let Some(g) = &self.grid {
            if !(1..=2).contains(&g.dims) {
                return bad(format!("grid dims must be 1 or 2, got {}", g.dims));
            }
            g.to_grid().map_err(|e| ValidationError(e.to_string()))?;
        }
        if let Some(t) = &self.time {
            if !(t.dt.is_finite() && t.dt > 0.0 && t.t_end.is_finite() && t.t_end >= t.dt) {
                return bad(format!("time grid needs 0 < dt <= t_end, got dt {} t_end {}", t.dt, t.t_end));
            }
            if t.outputs == 0 || t.outputs > t.steps() {
                return bad(format!("outputs must be in 1..={}, got {}", t.steps(), t.outputs));
            }
        }
        PhysicalConstants::from(self.constants)
            .validate()
            .map_err(|e| ValidationError(e.to_string()))?;
        Ok(())
    }
}
