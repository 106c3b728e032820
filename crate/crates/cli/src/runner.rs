//! Scenario orchestration.

use crate::catalog::{self, SCENARIO_NAMES};
use crate::config::{ScenarioConfig, ValidationError};
use crate::experiments::Runner;
use crate::report::{Record, Report};
use crate::setup::Setup;

/// Runs every requested experiment. Validation failures are returned as
/// errors before anything is computed; failures inside an experiment
/// become failing records and the run continues.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Report, ValidationError> {
    cfg.validate()?;
    let mut report = Report::default();
    if cfg.experiments.is_empty() {
        return Ok(report);
    }
    let setup = match Setup::build(cfg) {
        Ok(s) => s,
        Err(e) => {
            report.records.push(setup_error(cfg, &e));
            return Ok(report);
        }
    };
    let gauges = cfg
        .gauges
        .iter()
        .map(|g| (g.name.clone(), catalog::resolve_gauge(g).expect("validated gauge")))
        .collect();
    let time = cfg.time.clone().unwrap_or_else(|| catalog::default_time(&cfg.field.name));
    let runner = Runner::new(cfg, setup, gauges, time);
    for exp in &cfg.experiments {
        report.records.extend(runner.run(*exp));
    }
    report.series = runner.take_series();
    Ok(report)
}

fn setup_error(cfg: &ScenarioConfig, e: &anyhow::Error) -> Record {
    Record {
        scenario: cfg.name.clone(),
        experiment: "setup".into(),
        gauge: "-".into(),
        quantity: "error".into(),
        value: f64::NAN,
        reference: f64::NAN,
        residual: f64::NAN,
        tolerance: 0.0,
        pass: false,
        provenance: e.to_string(),
    }
}

/// Every catalog scenario with every catalog gauge and its default
/// experiments, tolerances multiplied by `tol_scale`.
pub fn verify_all(tol_scale: f64) -> Result<Report, ValidationError> {
    let mut report = Report::default();
    for name in SCENARIO_NAMES {
        let mut cfg = catalog::default_config(name).expect("catalog scenario");
        cfg.tolerances = cfg.tolerances.scaled(tol_scale);
        report.append(run_scenario(&cfg)?);
    }
    Ok(report)
}
