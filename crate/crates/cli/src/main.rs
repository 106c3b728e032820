use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use gauge_lab_cli::{emit_report, list_catalog, run_scenario, verify_all, Format, Report, ScenarioConfig};

#[derive(Parser)]
#[command(name = "gauge-lab", version, about = "Gauge-invariance experiments for a charged particle on a grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Directory for the report and plot data.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Every catalog scenario under every catalog gauge.
    VerifyAll {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List scenarios and gauges with their parameter schemas.
    Catalog,
}

fn finish(report: &Report, output: &OutputArgs, default_dir: Option<String>) -> anyhow::Result<bool> {
    let dir = output
        .out
        .clone()
        .or(default_dir.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gauge-lab-out"));
    let written = emit_report(report, output.format, &dir)?;
    for r in &report.records {
        println!(
            "{} {} {} {} {}: residual {:e} tol {:e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.scenario,
            r.experiment,
            r.gauge,
            r.quantity,
            r.residual,
            r.tolerance
        );
    }
    let failed = report.failures().count();
    println!("{} records, {failed} failed; report at {}", report.records.len(), written[0].display());
    Ok(report.passed())
}

fn check_scale(k: f64) -> anyhow::Result<()> {
    anyhow::ensure!(k.is_finite() && k > 0.0, "--tol-scale must be positive, got {k}");
    Ok(())
}

fn main_inner() -> anyhow::Result<bool> {
    match Cli::parse().command {
        Command::Run { config, output } => {
            check_scale(output.tol_scale)?;
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ScenarioConfig::from_json(&text).with_context(|| format!("parsing {}", config.display()))?;
            cfg.tolerances = cfg.tolerances.scaled(output.tol_scale);
            let report = run_scenario(&cfg)?;
            finish(&report, &output, cfg.output_dir.clone())
        }
        Command::VerifyAll { output } => {
            check_scale(output.tol_scale)?;
            let report = verify_all(output.tol_scale)?;
            finish(&report, &output, None)
        }
        Command::Catalog => {
            println!("{}", serde_json::to_string_pretty(&list_catalog())?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
