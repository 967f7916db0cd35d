//! `C_ij(t)` over the chain for an integrable (`hX = 0`) and a chaotic run.

use std::fs;
use std::time::Instant;

use crate::error::Result;
use crate::otoc::{OtocEngine, OtocSeries};

use super::config::{RunConfig, DEFAULT_GRID};
use super::recipes::{prepare_samples, ChainCouplings};
use super::report::{ExperimentReport, FileEntry, Regime};

/// Largest `|C|` treated as "no spreading".
pub const CONFINEMENT_TOLERANCE: f64 = 1e-10;

/// Level of `C` marking the arrival of the operator front.
pub const ONSET_LEVEL: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct SpreadingRun {
    pub regime: Regime,
    pub series: Vec<OtocSeries>,
}

#[derive(Clone, Debug)]
pub struct SpreadingOutput {
    pub report: ExperimentReport,
    pub runs: Vec<SpreadingRun>,
}

/// First grid time with `C > level`.
pub fn onset_time(series: &OtocSeries, level: f64) -> Option<f64> {
    series.points.iter().find(|p| p.c > level).map(|p| p.t)
}

/// Mean and population standard deviation of `C` over `[from, to]`.
pub fn window_stats(series: &OtocSeries, from: f64, to: f64) -> Option<(f64, f64)> {
    let values: Vec<f64> = series
        .points
        .iter()
        .filter(|p| p.t >= from - 1e-9 && p.t <= to + 1e-9)
        .map(|p| p.c)
        .collect();
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    Some((mean, var.sqrt()))
}

pub fn run_spreading(config: &RunConfig) -> Result<SpreadingOutput> {
    config.validate()?;
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    let mut report = ExperimentReport::new("spreading", config);
    let times = config.grid_or(DEFAULT_GRID).points();
    let evolution = config.evolution()?;
    let js: Vec<usize> = match &config.j {
        Some(js) => js.clone(),
        None => (1..=config.n).filter(|&j| j != config.i).collect(),
    };
    let configs = js.iter().map(|&j| config.butterfly(j)).collect::<Result<Vec<_>>>()?;
    let recipe = &config.states[0];
    let couplings = ChainCouplings { coupling: config.coupling, hz: config.hz };
    let psi = prepare_samples(recipe, config.n, couplings, config.seed)?.remove(0).state;

    let regimes = [("integrable", 0.0), ("chaotic", config.hx.unwrap_or(1.0))];
    let mut runs = Vec::new();
    for (name, hx) in regimes {
        let started = Instant::now();
        let regime = Regime { name: name.into(), coupling: config.coupling, hz: config.hz, hx };
        let engine = OtocEngine::new(config.hamiltonian(hx)?);
        let mut series = engine.sweep(&psi, &configs, &evolution, &times, config.method)?;
        for s in &mut series {
            s.regime = name.into();
            s.initial_state = recipe.to_string();
            s.check()?;
            s.write_csv(fs::File::create(dir.join(s.file_name()))?)?;
            report.files.push(FileEntry { path: s.file_name(), kind: "otoc-series".into(), rows: s.points.len() });
            let json = s.file_name().replace(".csv", ".json");
            report.write_json(dir, &json, "otoc-series-metadata", s)?;
        }

        let mut header = vec!["t".to_string()];
        header.extend(js.iter().map(|j| format!("j{j}")));
        let rows: Vec<Vec<f64>> = times
            .iter()
            .enumerate()
            .map(|(k, &t)| std::iter::once(t).chain(series.iter().map(|s| s.points[k].c)).collect())
            .collect();
        report.write_csv(dir, &format!("heatmap_{name}.csv"), "heatmap", &header, &rows)?;

        for s in &series {
            let j = s.config.j;
            let max_c = s.points.iter().map(|p| p.c.abs()).fold(0.0, f64::max);
            report.metric(format!("{name}.max_C.j{j}"), max_c);
            if let Some(t) = onset_time(s, ONSET_LEVEL) {
                report.metric(format!("{name}.onset.j{j}"), t);
            }
            if let Some((mean, std)) = window_stats(s, 2.0, 4.0) {
                report.metric(format!("{name}.mean_C_2_4.j{j}"), mean);
                report.metric(format!("{name}.std_C_2_4.j{j}"), std);
            }
            // With only Z-type terms X_i(t) stays on sites i-1..=i+1.
            if name == "integrable" && j.abs_diff(config.i) > 1 {
                report.check_at_most(format!("integrable confinement j{j}"), max_c, CONFINEMENT_TOLERANCE);
            }
        }
        report.regimes.push(regime.clone());
        report.timing.push((format!("regime {name}"), started.elapsed()));
        runs.push(SpreadingRun { regime, series });
    }
    let (a, b) = (&report.regimes[0], &report.regimes[1]);
    let other_differences = usize::from(a.coupling != b.coupling) + usize::from(a.hz != b.hz);
    report.check_at_most("regimes differ only in hX", other_differences as f64, 0.0);
    report.finish(dir)?;
    Ok(SpreadingOutput { report, runs })
}
