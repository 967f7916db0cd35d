//! Product-formula time evolution.
//!
//! A step is first flattened into a sequence of `(term, angle)` factors, each
//! meaning `exp(-i angle sigma_term)`, and only then compiled to gates. The
//! second-order step under the diagonal/off-diagonal split is emitted as a
//! palindrome (the off-diagonal full step is written as half steps around a
//! central full step, exact since those terms commute), so every order-2 and
//! order-4 step is symmetric and its inverse is itself with negated angles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, DepthReport, Layering};
use crate::error::{Error, Result};
use crate::pauli::PauliSumHamiltonian;
use crate::statevector::Statevector;
use crate::synth::synthesize_exponential;

pub use crate::oracle::exact_evolution;

/// Residual below which `t / dt` counts as a whole number of steps.
pub const STEP_RESIDUAL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TrotterOrder {
    First,
    Second,
    Fourth,
}

impl TrotterOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
            TrotterOrder::Fourth => 4,
        }
    }
}

impl TryFrom<u8> for TrotterOrder {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        match k {
            1 => Ok(TrotterOrder::First),
            2 => Ok(TrotterOrder::Second),
            4 => Ok(TrotterOrder::Fourth),
            _ => Err(Error::InvalidPlan(format!("unsupported Trotter order {k}"))),
        }
    }
}

impl From<TrotterOrder> for u8 {
    fn from(o: TrotterOrder) -> u8 {
        o.as_u8()
    }
}

impl fmt::Display for TrotterOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Split {
    /// Diagonal terms as one block, off-diagonal terms as the other.
    #[default]
    #[serde(rename = "hzhx")]
    HzHx,
    /// Every term is its own block.
    #[serde(rename = "term")]
    PerTerm,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::HzHx => "hzhx",
            Split::PerTerm => "term",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hzhx" | "hz-hx" => Ok(Split::HzHx),
            "term" | "per-term" => Ok(Split::PerTerm),
            _ => Err(Error::InvalidPlan(format!("unknown split '{s}' (expected hzhx or term)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub order: TrotterOrder,
    pub dt: f64,
    #[serde(default)]
    pub split: Split,
}

/// Whole steps plus an optional shorter final step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSchedule {
    pub full: usize,
    pub partial: Option<f64>,
}

impl StepSchedule {
    pub fn total(&self) -> usize {
        self.full + usize::from(self.partial.is_some())
    }
}

impl TrotterPlan {
    pub fn new(order: TrotterOrder, dt: f64, split: Split) -> Result<Self> {
        let plan = Self { order, dt, split };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidPlan(format!("time step must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    /// `r = round(t / dt)` steps when that reproduces `t`, otherwise
    /// `floor(t / dt)` steps followed by one partial step.
    pub fn schedule(&self, t: f64) -> Result<StepSchedule> {
        self.validate()?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidTime(t));
        }
        let r = (t / self.dt).round();
        if (t - r * self.dt).abs() < STEP_RESIDUAL {
            return Ok(StepSchedule { full: r as usize, partial: None });
        }
        let full = (t / self.dt).floor();
        let rest = t - full * self.dt;
        Ok(StepSchedule { full: full as usize, partial: (rest > 0.0).then_some(rest) })
    }

    /// Whether every time in `times` is a whole number of steps.
    pub fn commensurate(&self, times: &[f64]) -> bool {
        times
            .iter()
            .all(|&t| self.schedule(t).is_ok_and(|s| s.partial.is_none()))
    }
}

impl fmt::Display for TrotterPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order {} dt {} split {}", self.order, self.dt, self.split)
    }
}

/// Suzuki coefficient `p = 1 / (4 - 4^(1/3))`.
pub fn suzuki_p() -> f64 {
    1.0 / (4.0 - 4f64.cbrt())
}

/// One factor `exp(-i angle sigma_term)` of a product formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub term: usize,
    pub angle: f64,
}

fn blocks(h: &PauliSumHamiltonian, split: Split) -> (Vec<usize>, Vec<usize>) {
    match split {
        Split::PerTerm => ((0..h.terms().len()).collect(), Vec::new()),
        Split::HzHx => (0..h.terms().len()).partition(|&k| h.terms()[k].is_diagonal()),
    }
}

fn push_block(out: &mut Vec<Factor>, h: &PauliSumHamiltonian, terms: impl Iterator<Item = usize>, tau: f64) {
    out.extend(terms.map(|k| Factor { term: k, angle: h.terms()[k].coeff() * tau }));
}

fn second_order(out: &mut Vec<Factor>, h: &PauliSumHamiltonian, split: Split, tau: f64) {
    let half = tau / 2.0;
    let (a, b) = blocks(h, split);
    push_block(out, h, a.iter().copied(), half);
    if let Some((&last, rest)) = b.split_last() {
        push_block(out, h, rest.iter().copied(), half);
        push_block(out, h, std::iter::once(last), tau);
        push_block(out, h, rest.iter().rev().copied(), half);
    }
    push_block(out, h, a.iter().rev().copied(), half);
}

/// The factor sequence of one step of size `tau`.
pub fn step_factors(h: &PauliSumHamiltonian, tau: f64, order: TrotterOrder, split: Split) -> Result<Vec<Factor>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidPlan(format!("time step must be positive, got {tau}")));
    }
    let mut out = Vec::new();
    match order {
        TrotterOrder::First => {
            let (a, b) = blocks(h, split);
            push_block(&mut out, h, a.into_iter().chain(b), tau);
        }
        TrotterOrder::Second => second_order(&mut out, h, split, tau),
        TrotterOrder::Fourth => {
            let p = suzuki_p();
            for scale in [p, p, 1.0 - 4.0 * p, p, p] {
                second_order(&mut out, h, split, scale * tau);
            }
        }
    }
    Ok(out)
}

pub fn compile_factors(h: &PauliSumHamiltonian, factors: &[Factor]) -> Result<Circuit> {
    let mut c = Circuit::new(h.n());
    for f in factors {
        c.append(&synthesize_exponential(&h.terms()[f.term], f.angle)?.circuit)?;
    }
    Ok(c)
}

pub fn trotter_step(h: &PauliSumHamiltonian, dt: f64, order: TrotterOrder, split: Split) -> Result<Circuit> {
    compile_factors(h, &step_factors(h, dt, order, split)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionCircuit {
    pub plan: TrotterPlan,
    pub hamiltonian: PauliSumHamiltonian,
    pub t: f64,
    pub schedule: StepSchedule,
    pub step: Circuit,
    pub circuit: Circuit,
}

impl EvolutionCircuit {
    pub fn step_report(&self) -> DepthReport {
        self.step.depth_report()
    }

    pub fn report(&self) -> DepthReport {
        self.circuit.depth_report()
    }
}

pub fn evolution_circuit(h: &PauliSumHamiltonian, t: f64, plan: TrotterPlan) -> Result<EvolutionCircuit> {
    let schedule = plan.schedule(t)?;
    let step = trotter_step(h, plan.dt, plan.order, plan.split)?;
    let mut circuit = Circuit::new(h.n());
    for _ in 0..schedule.full {
        circuit.append(&step)?;
    }
    if let Some(rest) = schedule.partial {
        circuit.append(&trotter_step(h, rest, plan.order, plan.split)?)?;
    }
    Ok(EvolutionCircuit { plan, hamiltonian: h.clone(), t, schedule, step, circuit })
}

/// Depth report of `evolution_circuit(h, t, plan)` without building it.
pub fn evolution_depth(h: &PauliSumHamiltonian, t: f64, plan: TrotterPlan) -> Result<DepthReport> {
    let schedule = plan.schedule(t)?;
    let step = trotter_step(h, plan.dt, plan.order, plan.split)?;
    let mut layers = Layering::new(h.n());
    for _ in 0..schedule.full {
        layers.extend(step.gates());
    }
    if let Some(rest) = schedule.partial {
        layers.extend(trotter_step(h, rest, plan.order, plan.split)?.gates());
    }
    Ok(layers.report())
}

/// `U(t) psi` for every `t` in an increasing grid. The step circuit is
/// applied incrementally, which performs exactly the gate sequence of the
/// fresh circuit for each `t`; a partial final step is applied to a copy.
pub fn trajectory(h: &PauliSumHamiltonian, psi: &Statevector, plan: TrotterPlan, times: &[f64]) -> Result<Vec<Statevector>> {
    if psi.width() != h.n() {
        return Err(Error::InvalidApplication { circuit: h.n(), state: psi.width() });
    }
    let step = trotter_step(h, plan.dt, plan.order, plan.split)?;
    let mut current = psi.clone();
    let mut done = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let schedule = plan.schedule(t)?;
        if schedule.full < done {
            return Err(Error::InvalidInput("time grid must be increasing".into()));
        }
        for _ in done..schedule.full {
            current.apply_circuit(&step)?;
        }
        done = schedule.full;
        match schedule.partial {
            Some(rest) => {
                let mut s = current.clone();
                s.apply_circuit(&trotter_step(h, rest, plan.order, plan.split)?)?;
                out.push(s);
            }
            None => out.push(current.clone()),
        }
    }
    Ok(out)
}
