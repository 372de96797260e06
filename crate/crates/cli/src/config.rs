use std::path::{Path, PathBuf};

use dmlab::solver::SolverConfig;
use dmlab::suite::{Suite, SuiteSettings};
use dmlab::{Error, Grid, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = dmlab::suite::soliton_grid();
        Self {
            n: g.n(),
            length: g.length(),
        }
    }
}

/// Everything a run depends on. The copy written next to the outputs
/// reproduces the run when passed back with `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    /// Gauss–Legendre nodes on `[0, 1]` for the solver and tail analysis.
    pub nodes: usize,
    pub solver: SolverConfig,
    /// Suite run by `verify` when none is named on the command line.
    pub suite: Suite,
    pub checks: SuiteSettings,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub deterministic: bool,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            nodes: dmlab::suite::SOLITON_NODES,
            solver: SolverConfig::default(),
            suite: Suite::All,
            checks: SuiteSettings::default(),
            seed: SuiteSettings::default().seed,
            out: None,
            deterministic: false,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.solver.validate()?;
        if self.nodes == 0 {
            return Err(Error::InvalidArgument("nodes must be positive".into()));
        }
        if self.checks.nodes == 0 || self.checks.samples == 0 {
            return Err(Error::InvalidArgument("checks.nodes and checks.samples must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.length)
    }

    /// Suite settings with the run seed applied.
    pub fn suite_settings(&self) -> SuiteSettings {
        SuiteSettings {
            seed: self.seed,
            ..self.checks.clone()
        }
    }
}
