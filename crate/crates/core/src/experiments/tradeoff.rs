//! Accuracy against circuit depth for a few product formulas.

use std::fs;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuit::DepthReport;
use crate::error::{Error, Result};
use crate::otoc::{Evolution, Method, OtocEngine};
use crate::trotter::{evolution_depth, trotter_step, Split, TrotterOrder, TrotterPlan};

use super::config::{RunConfig, TimeGrid};
use super::recipes::{prepare_samples, ChainCouplings, StateRecipe};
use super::report::{ExperimentReport, Regime};

pub const TRADEOFF_GRID: TimeGrid = TimeGrid { start: 0.0, stop: 3.0, step: 0.02 };

/// Near-alignment threshold on `max |C - C_exact|`, calibrated against the
/// exact oracle at n = 9.
pub const ALIGNMENT_THRESHOLD: f64 = 0.1;

/// Threshold for the finest fourth-order variant.
pub const FINE_THRESHOLD: f64 = 1e-8;

pub const DEFAULT_J: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub name: String,
    pub plan: Option<TrotterPlan>,
    pub max_abs_dc: f64,
    pub step: Option<DepthReport>,
    /// Whole evolution up to the last grid time.
    pub total: Option<DepthReport>,
}

#[derive(Clone, Debug)]
pub struct TradeoffOutput {
    pub report: ExperimentReport,
    pub times: Vec<f64>,
    pub curves: Vec<(String, Vec<f64>)>,
    pub summary: Vec<VariantSummary>,
}

fn variant_name(p: &TrotterPlan) -> String {
    format!("o{}_dt{}_{}", p.order, p.dt, p.split)
}

pub fn default_variants() -> Vec<TrotterPlan> {
    let plan = |order, dt, split| TrotterPlan { order, dt, split };
    vec![
        plan(TrotterOrder::Fourth, 0.001, Split::HzHx),
        plan(TrotterOrder::Fourth, 0.1, Split::HzHx),
        plan(TrotterOrder::First, 0.01, Split::HzHx),
        plan(TrotterOrder::First, 0.01, Split::PerTerm),
    ]
}

pub fn run_trotter_tradeoff(config: &RunConfig) -> Result<TradeoffOutput> {
    run_tradeoff_variants(config, &default_variants())
}

pub fn run_tradeoff_variants(config: &RunConfig, variants: &[TrotterPlan]) -> Result<TradeoffOutput> {
    config.validate()?;
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    let mut report = ExperimentReport::new("tradeoff", config);
    let times = config.grid_or(TRADEOFF_GRID).points();
    let j = match config.j.as_deref() {
        None => DEFAULT_J,
        Some([j]) => *j,
        Some(_) => return Err(Error::Config("the tradeoff experiment takes a single j".into())),
    };
    let cfg = config.butterfly(j)?;
    let hx = config.hx.unwrap_or(1.0);
    let h = config.hamiltonian(hx)?;
    report.regimes.push(Regime { name: "chaotic".into(), coupling: config.coupling, hz: config.hz, hx });
    let couplings = ChainCouplings { coupling: config.coupling, hz: config.hz };
    let psi = prepare_samples(&StateRecipe::AllUp, config.n, couplings, config.seed)?.remove(0).state;
    let engine = OtocEngine::new(h.clone());

    let started = Instant::now();
    let exact = engine.series(&psi, &cfg, &Evolution::Exact, &times, Method::Direct)?.commutators();
    report.timing.push(("exact".into(), started.elapsed()));
    let mut curves = vec![("exact".to_string(), exact.clone())];
    let mut summary = vec![VariantSummary { name: "exact".into(), plan: None, max_abs_dc: 0.0, step: None, total: None }];
    let t_end = *times.last().expect("grid has a point");
    for plan in variants {
        plan.validate()?;
        let name = variant_name(plan);
        let started = Instant::now();
        let c = engine.series(&psi, &cfg, &Evolution::Trotter(*plan), &times, config.method)?.commutators();
        report.timing.push((name.clone(), started.elapsed()));
        let gap = c.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let step = trotter_step(&h, plan.dt, plan.order, plan.split)?.depth_report();
        let total = evolution_depth(&h, t_end, *plan)?;
        report.metric(format!("{name}.max_abs_dC"), gap);
        report.metric(format!("{name}.step_depth"), step.depth as f64);
        report.metric(format!("{name}.total_depth"), total.depth as f64);
        let fine = plan.order == TrotterOrder::Fourth && plan.dt <= 0.001;
        let tol = config.tolerance.unwrap_or(if fine { FINE_THRESHOLD } else { ALIGNMENT_THRESHOLD });
        report.check_at_most(format!("{name} alignment"), gap, tol);
        summary.push(VariantSummary { name: name.clone(), plan: Some(*plan), max_abs_dc: gap, step: Some(step), total: Some(total) });
        curves.push((name, c));
    }
    // Depth of each first-order variant relative to the finest fourth-order one.
    let deepest = summary
        .iter()
        .filter_map(|s| s.plan.filter(|p| p.order == TrotterOrder::Fourth).map(|p| (p.dt, s)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, s)| s);
    if let Some(reference) = deepest.cloned() {
        for s in summary.iter().filter(|s| s.plan.is_some_and(|p| p.order == TrotterOrder::First)) {
            let (a, b) = (s.step.unwrap(), reference.step.unwrap());
            report.check_below(format!("step depth {} vs {}", s.name, reference.name), a.depth as f64 / b.depth as f64, 1.0);
            let (a, b) = (s.total.unwrap(), reference.total.unwrap());
            report.check_below(format!("total depth {} vs {}", s.name, reference.name), a.depth as f64 / b.depth as f64, 1.0);
        }
    }

    let header: Vec<String> = std::iter::once("t".to_string()).chain(curves.iter().map(|(n, _)| n.clone())).collect();
    let rows: Vec<Vec<f64>> = (0..times.len())
        .map(|k| std::iter::once(times[k]).chain(curves.iter().map(|(_, c)| c[k])).collect())
        .collect();
    report.write_csv(dir, "tradeoff.csv", "tradeoff-curves", &header, &rows)?;

    let mut w = csv::Writer::from_path(dir.join("tradeoff_summary.csv"))?;
    w.write_record([
        "variant", "order", "dt", "split", "max_abs_dC", "step_gates", "step_cnots", "step_depth", "total_gates", "total_depth",
    ])?;
    for s in &summary {
        let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
        w.write_record([
            s.name.clone(),
            s.plan.map_or(String::new(), |p| p.order.to_string()),
            s.plan.map_or(String::new(), |p| p.dt.to_string()),
            s.plan.map_or(String::new(), |p| p.split.to_string()),
            s.max_abs_dc.to_string(),
            opt(s.step.map(|d| d.gate_count)),
            opt(s.step.map(|d| d.cnot_count)),
            opt(s.step.map(|d| d.depth)),
            opt(s.total.map(|d| d.gate_count)),
            opt(s.total.map(|d| d.depth)),
        ])?;
    }
    w.flush()?;
    report.files.push(super::report::FileEntry { path: "tradeoff_summary.csv".into(), kind: "tradeoff-summary".into(), rows: summary.len() });
    report.write_json(dir, "tradeoff_summary.json", "tradeoff-summary", &summary)?;
    report.finish(dir)?;
    Ok(TradeoffOutput { report, times, curves, summary })
}
