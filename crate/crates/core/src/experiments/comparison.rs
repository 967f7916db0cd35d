//! `C_ij(t)` for several initial states, circuit simulation against exact
//! evolution, with the state-level norm distance between the two.

use std::fs;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::otoc::{Evolution, Method, OtocEngine};
use crate::parallel::{batch_mode, map_jobs};
use crate::statevector::norm_distance;
use crate::trotter::trajectory;

use super::config::{RunConfig, DEFAULT_GRID};
use super::recipes::{prepare_samples, ChainCouplings, StateRecipe};
use super::report::{ExperimentReport, Regime};

/// Default V site.
pub const DEFAULT_J: usize = 3;

/// Curves of one recipe, averaged over its samples.
#[derive(Clone, Debug, PartialEq)]
pub struct StateCurves {
    pub recipe: StateRecipe,
    pub times: Vec<f64>,
    pub c_circuit: Vec<f64>,
    pub c_exact: Vec<f64>,
    /// Largest norm distance over samples at each time.
    pub error: Vec<f64>,
    pub degenerate: bool,
}

impl StateCurves {
    /// Largest error at times `<= until`.
    pub fn max_error(&self, until: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.error)
            .filter(|(t, _)| **t <= until + 1e-9)
            .map(|(_, e)| *e)
            .fold(0.0, f64::max)
    }

    pub fn max_commutator_gap(&self) -> f64 {
        self.c_circuit.iter().zip(&self.c_exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonOutput {
    pub report: ExperimentReport,
    pub curves: Vec<StateCurves>,
}

fn average(rows: &[Vec<f64>]) -> Vec<f64> {
    let k = rows.len() as f64;
    (0..rows[0].len()).map(|t| rows.iter().map(|r| r[t]).sum::<f64>() / k).collect()
}

/// Curves for one recipe. The circuit always uses the configured Trotter
/// plan; the reference is exact evolution with the direct method.
pub fn compare_state(config: &RunConfig, engine: &OtocEngine, recipe: &StateRecipe, j: usize, times: &[f64]) -> Result<StateCurves> {
    let plan = config.plan()?;
    let h = engine.hamiltonian();
    let cfg = config.butterfly(j)?;
    let couplings = ChainCouplings { coupling: config.coupling, hz: config.hz };
    let samples = prepare_samples(recipe, config.n, couplings, config.seed)?;
    let exact = engine.exact()?;
    let (mut circuit_rows, mut exact_rows, mut error_rows) = (Vec::new(), Vec::new(), Vec::new());
    for sample in &samples {
        let psi = &sample.state;
        circuit_rows.push(engine.series(psi, &cfg, &Evolution::Trotter(plan), times, config.method)?.commutators());
        exact_rows.push(engine.series(psi, &cfg, &Evolution::Exact, times, Method::Direct)?.commutators());
        let states = trajectory(h, psi, plan, times)?;
        let errors = times
            .iter()
            .zip(&states)
            .map(|(&t, s)| Ok(norm_distance(s, &exact.evolve(psi, t)?)?.raw))
            .collect::<Result<Vec<f64>>>()?;
        error_rows.push(errors);
    }
    let error = (0..times.len())
        .map(|t| error_rows.iter().map(|r| r[t]).fold(0.0, f64::max))
        .collect();
    Ok(StateCurves {
        recipe: recipe.clone(),
        times: times.to_vec(),
        c_circuit: average(&circuit_rows),
        c_exact: average(&exact_rows),
        error,
        degenerate: samples.iter().any(|s| s.degenerate),
    })
}

pub fn run_state_comparison(config: &RunConfig) -> Result<ComparisonOutput> {
    config.validate()?;
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    let mut report = ExperimentReport::new("states", config);
    let times = config.grid_or(DEFAULT_GRID).points();
    let j = match config.j.as_deref() {
        None => DEFAULT_J,
        Some([j]) => *j,
        Some(_) => return Err(Error::Config("the states experiment takes a single j".into())),
    };
    let hx = config.hx.unwrap_or(1.0);
    let engine = OtocEngine::new(config.hamiltonian(hx)?);
    let started = Instant::now();
    engine.exact()?.eigen()?;
    report.timing.push(("eigendecomposition".into(), started.elapsed()));
    report.regimes.push(Regime { name: "chaotic".into(), coupling: config.coupling, hz: config.hz, hx });

    let started = Instant::now();
    let curves = map_jobs(config.states.clone(), batch_mode(), |r| compare_state(config, &engine, &r, j, &times))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    report.timing.push(("curves".into(), started.elapsed()));

    let header: Vec<String> = ["t", "C_circuit", "C_exact", "norm_error"].iter().map(|s| s.to_string()).collect();
    for c in &curves {
        let name = c.recipe.name();
        let rows: Vec<Vec<f64>> = (0..times.len())
            .map(|k| vec![times[k], c.c_circuit[k], c.c_exact[k], c.error[k]])
            .collect();
        report.write_csv(dir, &format!("states_{name}.csv"), "state-comparison", &header, &rows)?;
        report.metric(format!("{name}.max_norm_error"), c.max_error(f64::INFINITY));
        report.metric(format!("{name}.max_norm_error_t_le_1"), c.max_error(1.0));
        report.metric(format!("{name}.max_abs_dC"), c.max_commutator_gap());
        if c.degenerate {
            report.notes.push(format!("{name}: degenerate ground space, lowest-index eigenvector used"));
        }
        if let Some(tol) = config.tolerance {
            report.check_at_most(format!("{name} norm error"), c.max_error(f64::INFINITY), tol);
        }
    }
    report.finish(dir)?;
    Ok(ComparisonOutput { report, curves })
}
