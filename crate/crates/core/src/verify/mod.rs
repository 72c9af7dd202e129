//! Simulation-versus-theory experiments with pass/fail checks and the
//! tables behind each comparison.
//!
//! Every experiment is deterministic given its seed. [`Scale::Quick`] shrinks
//! replicate counts for smoke runs; only [`Scale::Full`] budgets are meant to
//! be judged by the checks.

mod estimation;
mod fixed_node;
mod jr;
mod report;
mod sbm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use estimation::estimation_recovery;
pub use fixed_node::{fixed_node_grid, fixed_node_sweep, grid_table, FixedNodeSweep, GridPoint, BURN_IN};
pub use jr::{
    jr_convergence_rate, jr_equilibrium, jr_interventions, log_spaced_times, replicate_trajectories, trajectory_table,
};
pub use report::{format_float, write_csv, SCHEMA_VERSION};
pub use sbm::{
    band_table, moment_inequality_suite, relative_band_sweep, sbm_absolute_effect, sbm_centrality, sbm_expected_counts,
    sbm_relative_band, BandPoint,
};

/// Replicate budget of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    /// `full` at full scale, otherwise `quick`.
    pub fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub scale: Scale,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 1, scale: Scale::Full }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// One table cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
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

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(x) => write!(f, "{x}"),
            Cell::Float(x) => f.write_str(&format_float(*x)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Outcome of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Experiment {
    pub name: String,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Experiment {
    pub fn new(name: &str) -> Self {
        Self { name: name.into(), checks: Vec::new(), tables: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Failed check names joined by commas.
    pub fn failures(&self) -> String {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect::<Vec<_>>().join(", ")
    }
}

/// Named groups of experiments runnable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SbmAbsolute,
    SbmCounts,
    SbmBounds,
    SbmCentrality,
    JrConvergence,
    JrInterventions,
    FixedNode,
    EstimationRecovery,
    Moments,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::SbmAbsolute,
        Suite::SbmCounts,
        Suite::SbmBounds,
        Suite::SbmCentrality,
        Suite::JrConvergence,
        Suite::JrInterventions,
        Suite::FixedNode,
        Suite::EstimationRecovery,
        Suite::Moments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SbmAbsolute => "sbm-absolute",
            Suite::SbmCounts => "sbm-counts",
            Suite::SbmBounds => "sbm-bounds",
            Suite::SbmCentrality => "sbm-centrality",
            Suite::JrConvergence => "jr-convergence",
            Suite::JrInterventions => "jr-interventions",
            Suite::FixedNode => "fixed-node",
            Suite::EstimationRecovery => "estimation-recovery",
            Suite::Moments => "moments",
        }
    }

    pub fn run(self, options: &VerifyOptions) -> Result<Vec<Experiment>> {
        Ok(match self {
            Suite::SbmAbsolute => vec![sbm_absolute_effect(options)?],
            Suite::SbmCounts => vec![sbm_expected_counts(options)?],
            Suite::SbmBounds => vec![sbm_relative_band(options)?],
            Suite::SbmCentrality => vec![sbm_centrality(options)?],
            Suite::JrConvergence => vec![jr_equilibrium(options)?, jr_convergence_rate(options)?],
            Suite::JrInterventions => vec![jr_interventions(options)?],
            Suite::FixedNode => vec![fixed_node_grid(options)?],
            Suite::EstimationRecovery => vec![estimation_recovery(options)?],
            Suite::Moments => vec![moment_inequality_suite(options)?],
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Error::InvalidParams(format!("unknown suite '{s}'; expected one of {}", names.join(", ")))
        })
    }
}
