use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::otoc::{ButterflyConfig, Evolution, Method};
use crate::pauli::{build_ising_hamiltonian, PauliSumHamiltonian};
use crate::trotter::{Split, TrotterOrder, TrotterPlan};

use super::recipes::StateRecipe;

/// Times `start, start + step, ...` up to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Self { start, stop, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start >= 0.0 && self.stop >= self.start && self.stop.is_finite()) {
            return Err(Error::Config(format!("time grid [{}, {}] is not a valid range", self.start, self.stop)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("time stride must be positive, got {}", self.step)));
        }
        if (self.stop - self.start) / self.step > 1e6 {
            return Err(Error::Config("time grid has more than a million points".into()));
        }
        Ok(())
    }

    /// Grid points, rounded to 1e-12 so that printed times stay short.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionKind {
    #[default]
    Trotter,
    Exact,
}

/// Everything an experiment run depends on. Unset optional fields take
/// experiment-specific defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(rename = "J")]
    pub coupling: f64,
    #[serde(rename = "hZ")]
    pub hz: f64,
    #[serde(rename = "hX", skip_serializing_if = "Option::is_none")]
    pub hx: Option<f64>,
    pub order: TrotterOrder,
    pub dt: f64,
    pub split: Split,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<TimeGrid>,
    pub i: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<usize>>,
    pub states: Vec<StateRecipe>,
    pub seed: u64,
    /// Not echoed into reports, so runs into different directories match.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub method: Method,
    pub evolution: EvolutionKind,
    /// Oracle agreement threshold; breaches are reported as failed checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 9,
            coupling: -1.0,
            hz: 1.0,
            hx: None,
            order: TrotterOrder::Fourth,
            dt: 0.001,
            split: Split::HzHx,
            times: None,
            i: 5,
            j: None,
            states: StateRecipe::standard_set(),
            seed: 0,
            out: PathBuf::from("out"),
            method: Method::Interferometric,
            evolution: EvolutionKind::Trotter,
            tolerance: None,
        }
    }
}

pub const DEFAULT_GRID: TimeGrid = TimeGrid { start: 0.0, stop: 4.0, step: 0.02 };

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > 20 {
            return Err(Error::Config(format!("n must be in 2..=20, got {}", self.n)));
        }
        for (name, v) in [("J", self.coupling), ("hZ", self.hz), ("hX", self.hx.unwrap_or(0.0)), ("dt", self.dt)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        self.plan()?;
        if let Some(g) = &self.times {
            g.validate()?;
        }
        ButterflyConfig::new(self.n, self.i, self.i).map_err(|e| Error::Config(e.to_string()))?;
        for &j in self.j.iter().flatten() {
            ButterflyConfig::new(self.n, self.i, j).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.states.is_empty() {
            return Err(Error::Config("at least one initial state recipe is required".into()));
        }
        for r in &self.states {
            r.validate()?;
        }
        if let Some(t) = self.tolerance {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn plan(&self) -> Result<TrotterPlan> {
        TrotterPlan::new(self.order, self.dt, self.split).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn grid_or(&self, default: TimeGrid) -> TimeGrid {
        self.times.unwrap_or(default)
    }

    pub fn evolution(&self) -> Result<Evolution> {
        Ok(match self.evolution {
            EvolutionKind::Trotter => Evolution::Trotter(self.plan()?),
            EvolutionKind::Exact => Evolution::Exact,
        })
    }

    pub fn hamiltonian(&self, hx: f64) -> Result<PauliSumHamiltonian> {
        build_ising_hamiltonian(self.n, self.coupling, self.hz, hx)
    }

    pub fn butterfly(&self, j: usize) -> Result<ButterflyConfig> {
        ButterflyConfig::new(self.n, self.i, j)
    }
}
