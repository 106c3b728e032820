//! Built-in scenarios and gauge functions, addressable by name.

use gauge_lab::emfields::catalog::{gauge_by_name, GaugeParams};
use gauge_lab::emfields::GaugeFunction;
use serde::Serialize;

use crate::config::{
    ConstantsConfig, Experiment, GridConfig, Params, ScenarioConfig, Selection, TimeGrid, Tolerances,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub description: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Scenario,
    Gauge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
    pub params: Vec<ParamSchema>,
}

impl CatalogEntry {
    /// Every parameter at its default.
    pub fn example(&self) -> Params {
        self.params.iter().map(|p| (p.name.to_string(), p.default)).collect()
    }

    pub fn check_params(&self, params: &Params) -> Result<(), String> {
        for (k, v) in params {
            let s = self
                .params
                .iter()
                .find(|p| p.name == k)
                .ok_or_else(|| format!("`{}` has no parameter `{k}`", self.name))?;
            if !(v.is_finite() && *v >= s.min && *v <= s.max) {
                return Err(format!(
                    "parameter `{k}` of `{}` must lie in [{}, {}], got {v}",
                    self.name, s.min, s.max
                ));
            }
        }
        Ok(())
    }

    /// Value of `name`, falling back to the schema default.
    pub fn param(&self, params: &Params, name: &str) -> f64 {
        params.get(name).copied().unwrap_or_else(|| {
            self.params
                .iter()
                .find(|p| p.name == name)
                .unwrap_or_else(|| panic!("`{}` has no parameter `{name}`", self.name))
                .default
        })
    }
}

const fn p(name: &'static str, default: f64, min: f64, max: f64, description: &'static str) -> ParamSchema {
    ParamSchema {
        name,
        default,
        min,
        max,
        description,
    }
}

pub const SCENARIO_NAMES: [&str; 6] = [
    "ho1d-dipole",
    "landau2d",
    "coulomb-soft",
    "current-loop",
    "gaussian-blob",
    "uniformB-multipolar",
];

pub fn scenario_entries() -> Vec<CatalogEntry> {
    let drive = |amp: f64, freq: f64| {
        vec![
            p("e0", amp, 0.0, 1.0, "drive amplitude E0 in phi1 = -E0 sin(omega_d t) x"),
            p("omega_d", freq, 0.0, 10.0, "drive frequency"),
            p("basis", 8.0, 2.0, 32.0, "number of stationary states kept"),
        ]
    };
    vec![
        CatalogEntry {
            name: "ho1d-dipole",
            kind: EntryKind::Scenario,
            description: "1D harmonic oscillator under a resonant dipole drive",
            params: [vec![p("omega", 1.0, 0.1, 10.0, "trap frequency")], drive(0.01, 1.0)].concat(),
        },
        CatalogEntry {
            name: "landau2d",
            kind: EntryKind::Scenario,
            description: "uniform B in the plane with a soft circular wall, multipolar vector potential",
            params: vec![
                p("b", 1.0, 0.1, 5.0, "field strength along z"),
                p("wall_radius", 4.5, 1.0, 20.0, "radius where the wall starts"),
                p("wall_strength", 2.0, 0.1, 100.0, "quartic wall coefficient"),
                p("states", 24.0, 4.0, 64.0, "number of stationary states computed"),
            ],
        },
        CatalogEntry {
            name: "coulomb-soft",
            kind: EntryKind::Scenario,
            description: "1D softened Coulomb well phi = -k / sqrt(x^2 + a^2)",
            params: [
                vec![
                    p("k", 1.0, 0.0, 10.0, "strength"),
                    p("softening", 0.3, 0.05, 5.0, "core radius a"),
                ],
                drive(0.01, 0.5),
            ]
            .concat(),
        },
        CatalogEntry {
            name: "current-loop",
            kind: EntryKind::Scenario,
            description: "circular current loop, potentials from its discretized current",
            params: vec![
                p("current", 1.0, -10.0, 10.0, "loop current"),
                p("radius", 1.0, 0.1, 10.0, "loop radius"),
                p("tube", 0.01, 1e-3, 0.2, "tube width of the current profile"),
                p("center_x", 0.3, -5.0, 5.0, "loop center, x"),
                p("center_y", -0.2, -5.0, 5.0, "loop center, y"),
                p("center_z", 0.15, -5.0, 5.0, "loop center, z"),
                p("toroidal", 128.0, 16.0, 1024.0, "quadrature nodes around the loop"),
                p("points", 8.0, 1.0, 64.0, "field points for the gauge relation"),
            ],
        },
        CatalogEntry {
            name: "gaussian-blob",
            kind: EntryKind::Scenario,
            description: "static Gaussian charge blob away from the origin",
            params: vec![
                p("charge", 1.0, -10.0, 10.0, "total charge"),
                p("width", 0.15, 0.01, 1.0, "Gaussian width"),
                p("center_x", 1.5, -5.0, 5.0, "blob center, x"),
                p("center_y", 0.3, -5.0, 5.0, "blob center, y"),
                p("center_z", -0.2, -5.0, 5.0, "blob center, z"),
                p("points", 50.0, 1.0, 200.0, "field points for the gauge relation"),
            ],
        },
        CatalogEntry {
            name: "uniformB-multipolar",
            kind: EntryKind::Scenario,
            description: "uniform E and B with multipolar potentials about the origin",
            params: vec![
                p("bx", 0.0, -5.0, 5.0, "B, x"),
                p("by", 0.2, -5.0, 5.0, "B, y"),
                p("bz", 1.0, -5.0, 5.0, "B, z"),
                p("ex", 0.1, -5.0, 5.0, "E, x"),
                p("ey", 0.0, -5.0, 5.0, "E, y"),
                p("ez", 0.0, -5.0, 5.0, "E, z"),
            ],
        },
    ]
}

pub const GAUGE_NAMES: [&str; 5] = ["zero", "linear-x", "gaussian-bump", "g-times-t", "separable-fg"];

pub fn gauge_entries() -> Vec<CatalogEntry> {
    let d = GaugeParams::default();
    let bump = || {
        vec![
            p("amplitude", d.amplitude, -10.0, 10.0, "bump height"),
            p("width", d.width, 0.05, 10.0, "bump width"),
        ]
    };
    let rate = || vec![p("rate", d.rate, -10.0, 10.0, "g in chi = g t")];
    vec![
        CatalogEntry {
            name: "zero",
            kind: EntryKind::Gauge,
            description: "chi = 0",
            params: vec![],
        },
        CatalogEntry {
            name: "linear-x",
            kind: EntryKind::Gauge,
            description: "chi = c x",
            params: vec![p("slope", d.slope, -10.0, 10.0, "c")],
        },
        CatalogEntry {
            name: "gaussian-bump",
            kind: EntryKind::Gauge,
            description: "chi = a exp(-r^2 / (2 w^2))",
            params: bump(),
        },
        CatalogEntry {
            name: "g-times-t",
            kind: EntryKind::Gauge,
            description: "chi = g t",
            params: rate(),
        },
        CatalogEntry {
            name: "separable-fg",
            kind: EntryKind::Gauge,
            description: "gaussian-bump + g-times-t",
            params: [bump(), rate()].concat(),
        },
    ]
}

/// Scenarios first, then gauges, each in catalog order.
pub fn list_catalog() -> Vec<CatalogEntry> {
    [scenario_entries(), gauge_entries()].concat()
}

pub fn scenario_entry(name: &str) -> Option<CatalogEntry> {
    scenario_entries().into_iter().find(|e| e.name == name)
}

pub fn gauge_entry(name: &str) -> Option<CatalogEntry> {
    gauge_entries().into_iter().find(|e| e.name == name)
}

/// The gauge function a selection names.
pub fn resolve_gauge(sel: &Selection) -> Option<GaugeFunction> {
    let e = gauge_entry(&sel.name)?;
    let d = GaugeParams::default();
    let get = |k: &str, def: f64| if e.params.iter().any(|p| p.name == k) { e.param(&sel.params, k) } else { def };
    let params = GaugeParams {
        slope: get("slope", d.slope),
        amplitude: get("amplitude", d.amplitude),
        width: get("width", d.width),
        rate: get("rate", d.rate),
    };
    gauge_by_name(&sel.name, &params)
}

pub fn default_grid(field: &str) -> Option<GridConfig> {
    let g = |min, max, points, dims| GridConfig { min, max, points, dims };
    match field {
        "ho1d-dipole" => Some(g(-12.0, 12.0, 1024, 1)),
        "landau2d" => Some(g(-6.0, 6.0, 128, 2)),
        "coulomb-soft" => Some(g(-20.0, 20.0, 2047, 1)),
        _ => None,
    }
}

pub fn default_time(field: &str) -> TimeGrid {
    match field {
        "landau2d" => TimeGrid {
            t_end: 2.0,
            dt: 0.02,
            outputs: 10,
        },
        _ => TimeGrid {
            t_end: 10.0,
            dt: 0.01,
            outputs: 100,
        },
    }
}

pub fn default_experiments(field: &str) -> Vec<Experiment> {
    use Experiment::*;
    match field {
        "ho1d-dipole" | "coulomb-soft" => vec![
            Spectrum,
            EigenvalueShift,
            AmplitudePropagation,
            PdePropagation,
            GaugeSuite,
            Appendix1,
            Classical,
        ],
        "landau2d" => vec![Spectrum, GaugeSuite, Appendix1, Classical],
        "current-loop" | "gaussian-blob" => vec![Appendix2],
        "uniformB-multipolar" => vec![GaugeSuite, Classical],
        _ => vec![],
    }
}

/// The catalog scenario with every catalog gauge and its default experiments.
pub fn default_config(field: &str) -> Option<ScenarioConfig> {
    scenario_entry(field)?;
    Some(ScenarioConfig {
        name: field.to_string(),
        field: Selection::named(field),
        grid: default_grid(field),
        constants: ConstantsConfig::default(),
        gauges: GAUGE_NAMES.iter().map(|g| Selection::named(*g)).collect(),
        experiments: default_experiments(field),
        tolerances: Tolerances::default(),
        time: Some(default_time(field)),
        output_dir: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_validate_against_their_schemas() {
        for e in list_catalog() {
            assert!(e.check_params(&e.example()).is_ok(), "{}", e.name);
        }
    }

    #[test]
    fn every_catalog_gauge_resolves() {
        for name in GAUGE_NAMES {
            assert!(resolve_gauge(&Selection::named(name)).is_some());
        }
        assert!(resolve_gauge(&Selection::named("nope")).is_none());
    }

    #[test]
    fn default_configs_validate() {
        for name in SCENARIO_NAMES {
            default_config(name).unwrap().validate().unwrap();
        }
    }
}
