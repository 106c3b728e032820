//! Scenario configs, the built-in catalog, experiment orchestration and
//! reports for gauge-lab.

pub mod catalog;
pub mod config;
mod experiments;
pub mod report;
mod runner;
mod setup;

pub use catalog::{default_config, list_catalog, CatalogEntry};
pub use config::{Experiment, ScenarioConfig, Selection, Tolerances, ValidationError};
pub use report::{emit_report, Format, Record, Report, Series};
pub use runner::{run_scenario, verify_all};
