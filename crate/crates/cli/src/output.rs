//! Checks, data tables and the run report.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

/// One pass/fail claim: `value <comparator> bound`, where `bound` was derived
/// from `tolerance` (already multiplied by the run's tolerance scale).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub value: f64,
    pub comparator: Comparator,
    pub bound: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(id: &str, description: &str, value: f64, comparator: Comparator, bound: f64, tolerance: f64) -> Self {
        let passed = match comparator {
            Comparator::AtMost => value <= bound,
            Comparator::AtLeast => value >= bound,
            Comparator::Below => value < bound,
            Comparator::Above => value > bound,
        };
        Check { id: id.into(), description: description.into(), value, comparator, bound, tolerance, passed }
    }

    /// `value <= tol`.
    pub fn at_most(id: &str, description: &str, value: f64, tol: f64) -> Self {
        Self::new(id, description, value, Comparator::AtMost, tol, tol)
    }

    /// `value >= -tol`.
    pub fn not_below(id: &str, description: &str, value: f64, tol: f64) -> Self {
        Self::new(id, description, value, Comparator::AtLeast, -tol, tol)
    }

    /// `value >= bound` with no slack.
    pub fn at_least(id: &str, description: &str, value: f64, bound: f64) -> Self {
        Self::new(id, description, value, Comparator::AtLeast, bound, 0.0)
    }

    /// `value < bound` with no slack.
    pub fn below(id: &str, description: &str, value: f64, bound: f64) -> Self {
        Self::new(id, description, value, Comparator::Below, bound, 0.0)
    }

    /// A boolean claim recorded as `value = 1 >= 1`.
    pub fn holds(id: &str, description: &str, ok: bool) -> Self {
        Self::new(id, description, if ok { 1.0 } else { 0.0 }, Comparator::AtLeast, 1.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// A NaN float after a JSON round trip.
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) if x.is_nan() => "nan".into(),
            Cell::Float(x) => format!("{x:.15e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => "nan".into(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Float(x.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    /// CSV text with a leading `# schema: <table> v1` line.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?).expect("csv is utf-8");
        let mut out = String::new();
        writeln!(out, "# schema: {} v1", self.name).unwrap();
        out.push_str(&body);
        Ok(out)
    }
}

/// An experiment item that failed without stopping the batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub item: String,
    pub error: String,
}

/// What an experiment hands back to the driver.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub errors: Vec<ItemError>,
}

impl Outcome {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn error(&mut self, item: impl Into<String>, e: impl std::fmt::Display) {
        self.errors.push(ItemError { item: item.into(), error: e.to_string() });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub passed: bool,
    pub checks_passed: usize,
    pub checks_total: usize,
    pub checks: Vec<Check>,
    pub errors: Vec<ItemError>,
    pub tables: Vec<Table>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn new(scenario: Scenario, seed: u64, tolerance_scale: f64, outcome: Outcome, wall_clock_seconds: f64) -> Self {
        let checks_passed = outcome.checks.iter().filter(|c| c.passed).count();
        let checks_total = outcome.checks.len();
        RunReport {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario,
            seed,
            tolerance_scale,
            passed: checks_total > 0 && checks_passed == checks_total,
            checks_passed,
            checks_total,
            checks: outcome.checks,
            errors: outcome.errors,
            tables: outcome.tables,
            wall_clock_seconds,
        }
    }

    /// Writes `report.json` and one `<table>.csv` per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            std::fs::write(&path, t.to_csv()?)?;
            written.push(path);
        }
        let path = dir.join("report.json");
        let mut f = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, self).map_err(|e| CliError::Io(e.to_string()))?;
        f.write_all(b"\n")?;
        written.push(path);
        Ok(written)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Human-readable digest: one line per check, then item errors.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} ({}): {}/{} checks passed in {:.2}s", self.scenario.name, self.scenario.experiment.kind(), self.checks_passed, self.checks_total, self.wall_clock_seconds).unwrap();
        for c in &self.checks {
            let op = match c.comparator {
                Comparator::AtMost => "<=",
                Comparator::AtLeast => ">=",
                Comparator::Below => "<",
                Comparator::Above => ">",
            };
            writeln!(s, "  {} {}: {:.6e} {op} {:.6e}  {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.value, c.bound, c.description).unwrap();
        }
        for e in &self.errors {
            writeln!(s, "  error in {}: {}", e.item, e.error).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_schema_line_and_stable_floats() {
        let mut t = Table::new("demo", &["t", "ok", "label"]);
        t.push(vec![0.1.into(), true.into(), "a,b".into()]);
        t.push(vec![f64::NAN.into(), false.into(), "c".into()]);
        let text = t.to_csv().unwrap();
        assert_eq!(text, "# schema: demo v1\nt,ok,label\n1.000000000000000e-1,true,\"a,b\"\nnan,false,c\n");
    }

    #[test]
    fn comparators() {
        assert!(Check::at_most("a", "", 1e-9, 1e-8).passed);
        assert!(!Check::at_most("a", "", f64::NAN, 1e-8).passed);
        assert!(Check::not_below("b", "", -5e-4, 1e-3).passed);
        assert!(!Check::below("c", "", 0.0, 0.0).passed);
        assert!(Check::holds("d", "", true).passed && !Check::holds("d", "", false).passed);
    }
}
