use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::RunConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: String,
    pub kind: String,
    /// Data rows, header excluded.
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Couplings of one Hamiltonian used by a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub name: String,
    #[serde(rename = "J")]
    pub coupling: f64,
    #[serde(rename = "hZ")]
    pub hz: f64,
    #[serde(rename = "hX")]
    pub hx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub library: String,
    pub version: String,
    pub config: RunConfig,
    pub regimes: Vec<Regime>,
    pub files: Vec<FileEntry>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Wall-clock phases; written to timing.txt, never to report.json.
    #[serde(skip)]
    pub timing: Vec<(String, Duration)>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: &RunConfig) -> Self {
        Self {
            experiment: experiment.into(),
            library: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            regimes: Vec::new(),
            files: Vec::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            timing: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    /// Records `value <= threshold`.
    pub fn check_at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.checks.push(Check { name: name.into(), value, threshold, passed: value <= threshold });
    }

    /// Records `value < threshold`.
    pub fn check_below(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.checks.push(Check { name: name.into(), value, threshold, passed: value < threshold });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Writes a CSV under `dir` and records it in the manifest.
    pub fn write_csv(&mut self, dir: &Path, name: &str, kind: &str, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_path(dir.join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        self.files.push(FileEntry { path: name.into(), kind: kind.into(), rows: rows.len() });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, dir: &Path, name: &str, kind: &str, value: &T) -> Result<()> {
        fs::write(dir.join(name), serde_json::to_string_pretty(value)? + "\n")?;
        self.files.push(FileEntry { path: name.into(), kind: kind.into(), rows: 0 });
        Ok(())
    }

    /// `report.json` and `timing.txt`; returns the report path.
    pub fn finish(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("report.json");
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        let mut timing = String::new();
        for (phase, d) in &self.timing {
            timing.push_str(&format!("{phase}\t{:.3}s\n", d.as_secs_f64()));
        }
        fs::write(dir.join("timing.txt"), timing)?;
        Ok(path)
    }
}

/// Every manifest file exists and re-parses with the recorded row count.
pub fn verify_manifest(dir: &Path, report: &ExperimentReport) -> Result<()> {
    for f in &report.files {
        let path = dir.join(&f.path);
        if f.path.ends_with(".csv") {
            let mut r = csv::Reader::from_path(&path)?;
            let headers = r.headers()?.clone();
            // Time-indexed tables are all numeric; summaries may hold labels.
            let numeric = headers.get(0) == Some("t");
            let mut rows = 0;
            for rec in r.records() {
                let rec = rec?;
                if rec.len() != headers.len() || (numeric && rec.iter().any(|v| v.parse::<f64>().is_err())) {
                    return Err(Error::Parse { line: rows + 2, msg: format!("{}: malformed row", f.path) });
                }
                rows += 1;
            }
            if rows != f.rows {
                return Err(Error::Consistency(format!("{}: {rows} rows, manifest says {}", f.path, f.rows)));
            }
        } else {
            serde_json::from_str::<serde_json::Value>(&fs::read_to_string(&path)?)?;
        }
    }
    Ok(())
}

pub fn load_report(dir: &Path) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(&fs::read_to_string(dir.join("report.json"))?)?)
}
