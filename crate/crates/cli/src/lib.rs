//! Batch driver for the comparison-geometry workbench: scenario files in,
//! `report.json` and versioned CSV tables out.

pub mod catalog;
pub mod error;
pub mod experiments;
pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use error::CliError;
pub use output::RunReport;
pub use scenario::Scenario;

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tolerance_scale: Option<f64>,
}

/// Runs one parsed scenario. Never fails: item errors land in the report.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> RunReport {
    let seed = opts.seed.unwrap_or(scenario.seed);
    let scale = opts.tolerance_scale.unwrap_or(1.0);
    let start = Instant::now();
    let mut ctx = experiments::Ctx::new(seed, scale);
    let outcome = experiments::execute(scenario, &mut ctx);
    RunReport::new(scenario.clone(), seed, scale, outcome, start.elapsed().as_secs_f64())
}

/// Loads, runs and writes one scenario into `out_root/<name>`.
pub fn run_file(path: &Path, out_root: &Path, opts: &RunOptions) -> Result<(RunReport, PathBuf), CliError> {
    let scenario = Scenario::load(path)?;
    let report = run_scenario(&scenario, opts);
    let dir = out_root.join(&scenario.name);
    report.write(&dir)?;
    Ok((report, dir))
}
