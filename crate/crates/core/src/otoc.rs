//! Out-of-time-order correlators `F_ij(t) = <W(t) V W(t) V>` with
//! `W = X_i`, `V = X_j`, and the commutator norm `C = 2 (1 - Re F)`.
//!
//! Two evaluations are provided. The interferometric one runs the ancilla
//! circuit (V on the |0> branch before W(t), on the |1> branch after it) and
//! reads `<X>` of the ancilla. The direct one evaluates the operator word
//! `U^dag X_i U X_j U^dag X_i U X_j` as an inner product of two states.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Polarity};
use crate::error::{Error, Result};
use crate::oracle::{adjoint_matvec, matmul, matvec, simulated_unitary, CMatrix, ExactEvolver, DEFAULT_ORACLE_LIMIT};
use crate::parallel::{batch_mode, map_jobs};
use crate::pauli::{PauliLetter, PauliString, PauliSumHamiltonian};
use crate::statevector::{expect_pauli, Statevector};
use crate::trotter::{evolution_circuit, trotter_step, EvolutionCircuit, TrotterPlan};

/// Range slack for `Re F` and `C`.
pub const RANGE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ButterflyConfig {
    pub n: usize,
    /// Site of W.
    pub i: usize,
    /// Site of V.
    pub j: usize,
    #[serde(default = "x_letter")]
    pub w: PauliLetter,
    #[serde(default = "x_letter")]
    pub v: PauliLetter,
}

fn x_letter() -> PauliLetter {
    PauliLetter::X
}

impl ButterflyConfig {
    pub fn new(n: usize, i: usize, j: usize) -> Result<Self> {
        let cfg = Self { n, i, j, w: PauliLetter::X, v: PauliLetter::X };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.i == 0 || self.i > self.n || self.j == 0 || self.j > self.n {
            return Err(Error::InvalidProtocol(format!(
                "sites i = {}, j = {} outside 1..={}",
                self.i, self.j, self.n
            )));
        }
        if self.w.is_identity() || self.v.is_identity() {
            return Err(Error::InvalidProtocol("W and V must be non-identity Paulis".into()));
        }
        Ok(())
    }

    fn w_string(&self) -> PauliString {
        PauliString::single(self.n, self.i, self.w, 1.0).expect("validated site")
    }

    fn v_string(&self) -> PauliString {
        PauliString::single(self.n, self.j, self.v, 1.0).expect("validated site")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtocPoint {
    pub t: f64,
    #[serde(rename = "reF")]
    pub re_f: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Imaginary part of F where the method produces one.
    #[serde(rename = "imF", skip_serializing_if = "Option::is_none", default)]
    pub im_f: Option<f64>,
}

impl OtocPoint {
    pub fn new(t: f64, re_f: f64, im_f: Option<f64>) -> Self {
        Self { t, re_f, c: 2.0 * (1.0 - re_f), im_f }
    }

    pub fn check_range(&self) -> Result<()> {
        let tol = RANGE_TOLERANCE;
        if !(self.re_f >= -1.0 - tol && self.re_f <= 1.0 + tol && self.c >= -tol && self.c <= 4.0 + tol) {
            return Err(Error::Consistency(format!(
                "OTOC point out of range at t = {}: reF = {}, C = {}",
                self.t, self.re_f, self.c
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "interf")]
    Interferometric,
    #[serde(rename = "direct")]
    Direct,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Interferometric => "interf",
            Method::Direct => "direct",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interf" | "interferometric" => Ok(Method::Interferometric),
            "direct" => Ok(Method::Direct),
            _ => Err(Error::InvalidProtocol(format!("unknown method '{s}' (expected interf or direct)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Evolution {
    Trotter(TrotterPlan),
    Exact,
}

impl fmt::Display for Evolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evolution::Trotter(p) => write!(f, "trotter ({p})"),
            Evolution::Exact => f.write_str("exact"),
        }
    }
}

/// How Trotterized `U(t)` is realized during a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Dense sweep when it is cheaper than fresh circuits and n <= 10.
    #[default]
    Auto,
    /// A fresh evolution circuit per time point.
    Circuit,
    /// `U(t_k) = S^m U(t_{k-1})` with `S` the dense matrix of one step; a
    /// partial final step is applied as a circuit.
    DenseSweep,
}

/// Widest register `Backend::Auto` runs as a dense sweep.
const DENSE_SWEEP_MAX_QUBITS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtocSeries {
    pub config: ButterflyConfig,
    pub method: Method,
    pub evolution: Evolution,
    pub initial_state: String,
    pub regime: String,
    pub points: Vec<OtocPoint>,
}

impl OtocSeries {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn commutators(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.c).collect()
    }

    pub fn file_name(&self) -> String {
        format!("otoc_i{}_j{}_{}_{}.csv", self.config.i, self.config.j, self.regime, self.method)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "reF", "C"])?;
        for p in &self.points {
            out.write_record([p.t.to_string(), p.re_f.to_string(), p.c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Vec<OtocPoint>> {
        let mut r = csv::Reader::from_path(path)?;
        let mut points = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec?;
            let field = |c: usize| -> Result<f64> {
                rec.get(c)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Parse { line: k + 2, msg: format!("bad column {c}") })
            };
            points.push(OtocPoint { t: field(0)?, re_f: field(1)?, c: field(2)?, im_f: None });
        }
        Ok(points)
    }

    pub fn check(&self) -> Result<()> {
        for p in &self.points {
            p.check_range()?;
        }
        check_times(&self.times())
    }
}

pub fn check_times(times: &[f64]) -> Result<()> {
    if let Some(&bad) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidTime(bad));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `U` and `U^dagger` acting on n-qubit states.
pub trait Propagator: Sync {
    fn width(&self) -> usize;
    fn forward(&self, s: &Statevector) -> Result<Statevector>;
    fn backward(&self, s: &Statevector) -> Result<Statevector>;
}

/// A circuit and its inverse, simulated gate by gate.
pub struct CircuitPropagator {
    forward: Circuit,
    backward: Circuit,
}

impl CircuitPropagator {
    pub fn new(u: &Circuit) -> Self {
        Self { forward: u.clone(), backward: u.invert() }
    }
}

impl Propagator for CircuitPropagator {
    fn width(&self) -> usize {
        self.forward.width()
    }

    fn forward(&self, s: &Statevector) -> Result<Statevector> {
        let mut out = s.clone();
        out.apply_circuit(&self.forward)?;
        Ok(out)
    }

    fn backward(&self, s: &Statevector) -> Result<Statevector> {
        let mut out = s.clone();
        out.apply_circuit(&self.backward)?;
        Ok(out)
    }
}

/// `e^{-iHt}` from the cached eigendecomposition.
pub struct ExactPropagator<'a> {
    pub evolver: &'a ExactEvolver,
    pub t: f64,
}

impl Propagator for ExactPropagator<'_> {
    fn width(&self) -> usize {
        self.evolver.hamiltonian().n()
    }

    fn forward(&self, s: &Statevector) -> Result<Statevector> {
        self.evolver.evolve(s, self.t)
    }

    fn backward(&self, s: &Statevector) -> Result<Statevector> {
        self.evolver.evolve(s, -self.t)
    }
}

/// A dense unitary.
pub struct MatrixPropagator {
    width: usize,
    matrix: CMatrix,
}

impl MatrixPropagator {
    pub fn new(width: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != 1 << width || !matrix.is_square() {
            return Err(Error::InvalidProtocol(format!("matrix is not {width}-qubit sized")));
        }
        Ok(Self { width, matrix })
    }
}

impl Propagator for MatrixPropagator {
    fn width(&self) -> usize {
        self.width
    }

    fn forward(&self, s: &Statevector) -> Result<Statevector> {
        check_width(self.width, s)?;
        Ok(Statevector::from_raw(self.width, matvec(&self.matrix, s.amplitudes())))
    }

    fn backward(&self, s: &Statevector) -> Result<Statevector> {
        check_width(self.width, s)?;
        Ok(Statevector::from_raw(self.width, adjoint_matvec(&self.matrix, s.amplitudes())))
    }
}

fn check_width(n: usize, s: &Statevector) -> Result<()> {
    if s.width() != n {
        return Err(Error::InvalidProtocol(format!("{}-qubit state for an {n}-qubit evolution", s.width())));
    }
    Ok(())
}

fn check_inputs(psi: &Statevector, cfg: &ButterflyConfig, width: usize) -> Result<()> {
    cfg.validate()?;
    if psi.width() != cfg.n || width != cfg.n {
        return Err(Error::InvalidProtocol(format!(
            "state width {}, evolution width {width}, butterfly n = {}",
            psi.width(),
            cfg.n
        )));
    }
    Ok(())
}

/// Gates realizing a single-site Pauli `P_q`.
pub fn pauli_gates(letter: PauliLetter, q: usize) -> Vec<Gate> {
    match letter {
        PauliLetter::I => Vec::new(),
        PauliLetter::X => vec![Gate::X(q)],
        PauliLetter::Z => vec![Gate::S(q), Gate::S(q)],
        // S X S^dagger = Y
        PauliLetter::Y => vec![Gate::Sdag(q), Gate::X(q), Gate::S(q)],
    }
}

/// The (n+1)-qubit interferometric circuit; the ancilla is qubit n+1.
pub fn interferometric_circuit(cfg: &ButterflyConfig, u: &Circuit) -> Result<Circuit> {
    cfg.validate()?;
    if u.width() != cfg.n {
        return Err(Error::InvalidProtocol(format!("{}-qubit U for n = {}", u.width(), cfg.n)));
    }
    let width = cfg.n + 1;
    let anc = width;
    let v = Circuit::from_gates(width, pauli_gates(cfg.v, cfg.j))?;
    let mut c = Circuit::new(width);
    c.push(Gate::H(anc))?;
    c.push(Gate::Controlled { control: anc, polarity: Polarity::OnZero, body: v.clone() })?;
    c.append(&u.widened(width)?)?;
    for g in pauli_gates(cfg.w, cfg.i) {
        c.push(g)?;
    }
    c.append(&u.invert().widened(width)?)?;
    c.push(Gate::Controlled { control: anc, polarity: Polarity::OnOne, body: v })?;
    Ok(c)
}

fn ancilla_x(width: usize) -> PauliString {
    PauliString::single(width, width, PauliLetter::X, 1.0).expect("ancilla site")
}

/// `Re F` as `<X>` of the ancilla after the interferometric circuit.
pub fn interferometric_re_f(psi: &Statevector, cfg: &ButterflyConfig, u: &EvolutionCircuit) -> Result<f64> {
    interferometric_re_f_circuit(psi, cfg, &u.circuit)
}

pub fn interferometric_re_f_circuit(psi: &Statevector, cfg: &ButterflyConfig, u: &Circuit) -> Result<f64> {
    check_inputs(psi, cfg, u.width())?;
    let circuit = interferometric_circuit(cfg, u)?;
    let mut state = psi.tensor(&Statevector::zero(1)?)?;
    state.apply_circuit(&circuit)?;
    Ok(expect_pauli(&state, &ancilla_x(cfg.n + 1))?.value)
}

/// The interferometric protocol with the ancilla register held as its two
/// n-qubit branches, so that `U` can be any propagator.
pub fn interferometric_re_f_with(psi: &Statevector, cfg: &ButterflyConfig, u: &dyn Propagator) -> Result<f64> {
    check_inputs(psi, cfg, u.width())?;
    let (w, v) = (cfg.w_string(), cfg.v_string());
    // H on the ancilla: both branches hold psi / sqrt(2).
    let mut zero = psi.apply_pauli(&v)?;
    let mut one = psi.clone();
    for branch in [&mut zero, &mut one] {
        let evolved = u.forward(branch)?.apply_pauli(&w)?;
        *branch = u.backward(&evolved)?;
    }
    let one = one.apply_pauli(&v)?;
    // <X_anc> = 2 Re(<b0|b1>) with each branch carrying weight 1/2.
    Ok(zero.inner(&one)?.re)
}

/// `F` from the operator word, applied to states right to left.
pub fn direct_f(psi: &Statevector, cfg: &ButterflyConfig, u: &dyn Propagator) -> Result<Complex64> {
    check_inputs(psi, cfg, u.width())?;
    let (w, v) = (cfg.w_string(), cfg.v_string());
    let a = u.forward(&psi.apply_pauli(&v)?)?;
    let c = u.backward(&a.apply_pauli(&w)?)?;
    let b = u.forward(psi)?;
    let d = u.backward(&b.apply_pauli(&w)?)?;
    d.inner(&c.apply_pauli(&v)?)
}

pub fn direct_re_f(
    h: &PauliSumHamiltonian,
    psi: &Statevector,
    cfg: &ButterflyConfig,
    evolution: &Evolution,
    t: f64,
) -> Result<f64> {
    let f = match evolution {
        Evolution::Exact => {
            let evolver = ExactEvolver::new(h.clone())?;
            direct_f(psi, cfg, &ExactPropagator { evolver: &evolver, t })?
        }
        Evolution::Trotter(plan) => direct_f(psi, cfg, &CircuitPropagator::new(&evolution_circuit(h, t, *plan)?.circuit))?,
    };
    Ok(f.re)
}

fn evaluate(psi: &Statevector, cfg: &ButterflyConfig, method: Method, t: f64, u: &dyn Propagator) -> Result<OtocPoint> {
    let point = match method {
        Method::Direct => {
            let f = direct_f(psi, cfg, u)?;
            if f.im.abs() > RANGE_TOLERANCE {
                log::debug!("Im F = {:e} at t = {t} (i = {}, j = {})", f.im, cfg.i, cfg.j);
            }
            OtocPoint::new(t, f.re, Some(f.im))
        }
        Method::Interferometric => OtocPoint::new(t, interferometric_re_f_with(psi, cfg, u)?, None),
    };
    point.check_range()?;
    Ok(point)
}

/// OTOC sweeps for one Hamiltonian, sharing its exact eigendecomposition.
pub struct OtocEngine {
    hamiltonian: PauliSumHamiltonian,
    exact: Option<ExactEvolver>,
    pub backend: Backend,
}

impl OtocEngine {
    pub fn new(hamiltonian: PauliSumHamiltonian) -> Self {
        let exact = ExactEvolver::new(hamiltonian.clone()).ok();
        Self { hamiltonian, exact, backend: Backend::Auto }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn hamiltonian(&self) -> &PauliSumHamiltonian {
        &self.hamiltonian
    }

    pub fn exact(&self) -> Result<&ExactEvolver> {
        self.exact.as_ref().ok_or(Error::OracleSize { n: self.hamiltonian.n(), limit: DEFAULT_ORACLE_LIMIT })
    }

    /// One series per config on a shared time grid. Each time point uses
    /// its own `U(t)`; no series is built by extending a previous one.
    pub fn sweep(
        &self,
        psi: &Statevector,
        configs: &[ButterflyConfig],
        evolution: &Evolution,
        times: &[f64],
        method: Method,
    ) -> Result<Vec<OtocSeries>> {
        check_times(times)?;
        for cfg in configs {
            check_inputs(psi, cfg, self.hamiltonian.n())?;
        }
        let rows: Vec<Vec<OtocPoint>> = match evolution {
            Evolution::Exact => {
                let evolver = self.exact()?;
                evolver.eigen()?;
                let jobs: Vec<(f64, ButterflyConfig)> =
                    times.iter().flat_map(|&t| configs.iter().map(move |c| (t, *c))).collect();
                let flat = map_jobs(jobs, batch_mode(), |(t, cfg)| {
                    evaluate(psi, &cfg, method, t, &ExactPropagator { evolver, t })
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
                flat.chunks(configs.len().max(1)).map(|c| c.to_vec()).collect()
            }
            Evolution::Trotter(plan) => {
                if self.use_dense_sweep(plan, times)? {
                    self.dense_sweep(psi, configs, plan, times, method)?
                } else {
                    let per_time = map_jobs(times.to_vec(), batch_mode(), |t| -> Result<Vec<OtocPoint>> {
                        let u = CircuitPropagator::new(&evolution_circuit(&self.hamiltonian, t, *plan)?.circuit);
                        configs.iter().map(|cfg| evaluate(psi, cfg, method, t, &u)).collect()
                    });
                    per_time.into_iter().collect::<Result<Vec<_>>>()?
                }
            }
        };
        Ok(configs
            .iter()
            .enumerate()
            .map(|(k, cfg)| OtocSeries {
                config: *cfg,
                method,
                evolution: *evolution,
                initial_state: String::new(),
                regime: String::new(),
                points: rows.iter().map(|r| r[k]).collect(),
            })
            .collect())
    }

    pub fn series(
        &self,
        psi: &Statevector,
        cfg: &ButterflyConfig,
        evolution: &Evolution,
        times: &[f64],
        method: Method,
    ) -> Result<OtocSeries> {
        Ok(self.sweep(psi, std::slice::from_ref(cfg), evolution, times, method)?.remove(0))
    }

    fn use_dense_sweep(&self, plan: &TrotterPlan, times: &[f64]) -> Result<bool> {
        let n = self.hamiltonian.n();
        match self.backend {
            Backend::Circuit => Ok(false),
            Backend::DenseSweep if n > DEFAULT_ORACLE_LIMIT => Err(Error::OracleSize { n, limit: DEFAULT_ORACLE_LIMIT }),
            Backend::DenseSweep => Ok(true),
            Backend::Auto => {
                // Building S costs 2^n step simulations; fresh circuits cost
                // about four per step per time point.
                let mut work = 0usize;
                for &t in times {
                    work += 4 * plan.schedule(t)?.total();
                }
                Ok(n <= DENSE_SWEEP_MAX_QUBITS && work > 1 << n)
            }
        }
    }

    fn dense_sweep(
        &self,
        psi: &Statevector,
        configs: &[ButterflyConfig],
        plan: &TrotterPlan,
        times: &[f64],
        method: Method,
    ) -> Result<Vec<Vec<OtocPoint>>> {
        let h = &self.hamiltonian;
        let n = h.n();
        let step = simulated_unitary(&trotter_step(h, plan.dt, plan.order, plan.split)?)?;
        let mut powers: Vec<(usize, CMatrix)> = Vec::new();
        let mut u = CMatrix::identity(1 << n, 1 << n);
        let mut done = 0usize;
        let mut rows = Vec::with_capacity(times.len());
        for &t in times {
            let schedule = plan.schedule(t)?;
            let gap = schedule.full - done;
            if gap > 0 {
                let power = match powers.iter().position(|(g, _)| *g == gap) {
                    Some(k) => &powers[k].1,
                    None => {
                        powers.push((gap, repeated_product(&step, gap)));
                        &powers.last().unwrap().1
                    }
                };
                u = matmul(power, &u);
                done = schedule.full;
            }
            let tail = match schedule.partial {
                Some(rest) => Some(CircuitPropagator::new(&trotter_step(h, rest, plan.order, plan.split)?)),
                None => None,
            };
            let prop = SweepPropagator { width: n, matrix: &u, tail };
            let row = map_jobs(configs.to_vec(), batch_mode(), |cfg| evaluate(psi, &cfg, method, t, &prop));
            rows.push(row.into_iter().collect::<Result<Vec<_>>>()?);
        }
        Ok(rows)
    }
}

/// `S^r` as a dense matrix followed by an optional partial-step circuit.
struct SweepPropagator<'a> {
    width: usize,
    matrix: &'a CMatrix,
    tail: Option<CircuitPropagator>,
}

impl Propagator for SweepPropagator<'_> {
    fn width(&self) -> usize {
        self.width
    }

    fn forward(&self, s: &Statevector) -> Result<Statevector> {
        check_width(self.width, s)?;
        let out = Statevector::from_raw(self.width, matvec(self.matrix, s.amplitudes()));
        match &self.tail {
            Some(tail) => tail.forward(&out),
            None => Ok(out),
        }
    }

    fn backward(&self, s: &Statevector) -> Result<Statevector> {
        check_width(self.width, s)?;
        let s = match &self.tail {
            Some(tail) => tail.backward(s)?,
            None => s.clone(),
        };
        Ok(Statevector::from_raw(self.width, adjoint_matvec(self.matrix, s.amplitudes())))
    }
}

/// `m^k` by repeated left multiplication, mirroring k consecutive steps.
fn repeated_product(m: &CMatrix, k: usize) -> CMatrix {
    let mut out = m.clone();
    for _ in 1..k {
        out = matmul(m, &out);
    }
    out
}

/// A single series with a freshly built engine.
pub fn commutator_series(
    h: &PauliSumHamiltonian,
    psi: &Statevector,
    cfg: &ButterflyConfig,
    evolution: &Evolution,
    times: &[f64],
    method: Method,
) -> Result<OtocSeries> {
    OtocEngine::new(h.clone()).series(psi, cfg, evolution, times, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::build_ising_hamiltonian;
    use crate::trotter::{Split, TrotterOrder};

    fn plan(order: TrotterOrder, dt: f64) -> TrotterPlan {
        TrotterPlan::new(order, dt, Split::HzHx).unwrap()
    }

    #[test]
    fn time_zero_commutes() {
        let psi = Statevector::zero(3).unwrap();
        let empty = Circuit::new(3);
        for (i, j) in [(1, 2), (2, 2), (3, 1)] {
            let cfg = ButterflyConfig::new(3, i, j).unwrap();
            let re = interferometric_re_f_circuit(&psi, &cfg, &empty).unwrap();
            assert!((re - 1.0).abs() < 1e-14);
            let f = direct_f(&psi, &cfg, &CircuitPropagator::new(&empty)).unwrap();
            assert!((f.re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn protocols_agree_on_a_small_chain() {
        let h = build_ising_hamiltonian(3, -1.0, 1.0, 1.0).unwrap();
        let psi = Statevector::zero(3).unwrap();
        let u = evolution_circuit(&h, 0.7, plan(TrotterOrder::Second, 0.05)).unwrap();
        let cfg = ButterflyConfig::new(3, 2, 3).unwrap();
        let a = interferometric_re_f(&psi, &cfg, &u).unwrap();
        let prop = CircuitPropagator::new(&u.circuit);
        let b = direct_f(&psi, &cfg, &prop).unwrap().re;
        let c = interferometric_re_f_with(&psi, &cfg, &prop).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        assert!((a - c).abs() < 1e-12);
        assert!(a < 0.999, "expected a visible commutator, reF = {a}");
    }

    #[test]
    fn pauli_gate_bodies() {
        use crate::oracle::{circuit_matrix, dense_string};
        for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            let c = Circuit::from_gates(1, pauli_gates(l, 1)).unwrap();
            let d = circuit_matrix(&c) - dense_string(&PauliString::single(1, 1, l, 1.0).unwrap()).unwrap();
            assert!(d.norm() < 1e-15, "{l:?}");
        }
    }

    #[test]
    fn dense_sweep_matches_fresh_circuits() {
        let h = build_ising_hamiltonian(4, -1.0, 1.0, 1.0).unwrap();
        let psi = Statevector::zero(4).unwrap();
        let cfgs = [ButterflyConfig::new(4, 2, 4).unwrap(), ButterflyConfig::new(4, 2, 1).unwrap()];
        let evo = Evolution::Trotter(plan(TrotterOrder::Fourth, 0.05));
        let times = [0.0, 0.1, 0.2, 0.37, 0.4, 0.52];
        for method in [Method::Direct, Method::Interferometric] {
            let fresh = OtocEngine::new(h.clone()).with_backend(Backend::Circuit).sweep(&psi, &cfgs, &evo, &times, method).unwrap();
            let dense = OtocEngine::new(h.clone()).with_backend(Backend::DenseSweep).sweep(&psi, &cfgs, &evo, &times, method).unwrap();
            for (a, b) in fresh.iter().zip(&dense) {
                for (p, q) in a.points.iter().zip(&b.points) {
                    assert!((p.re_f - q.re_f).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ButterflyConfig::new(3, 0, 1).is_err());
        assert!(ButterflyConfig::new(3, 1, 4).is_err());
        let h = build_ising_hamiltonian(3, -1.0, 1.0, 1.0).unwrap();
        let psi = Statevector::zero(2).unwrap();
        let cfg = ButterflyConfig::new(3, 1, 2).unwrap();
        assert!(matches!(
            commutator_series(&h, &psi, &cfg, &Evolution::Exact, &[0.0], Method::Direct),
            Err(Error::InvalidProtocol(_))
        ));
        let psi = Statevector::zero(3).unwrap();
        assert!(commutator_series(&h, &psi, &cfg, &Evolution::Exact, &[0.2, 0.1], Method::Direct).is_err());
        let mut bad = cfg;
        bad.n = 4;
        assert!(interferometric_re_f_circuit(&psi, &bad, &Circuit::new(3)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let h = build_ising_hamiltonian(3, -1.0, 1.0, 1.0).unwrap();
        let psi = Statevector::zero(3).unwrap();
        let cfg = ButterflyConfig::new(3, 2, 1).unwrap();
        let mut s = commutator_series(&h, &psi, &cfg, &Evolution::Exact, &[0.0, 0.5, 1.0], Method::Direct).unwrap();
        s.regime = "chaotic".into();
        assert_eq!(s.file_name(), "otoc_i2_j1_chaotic_direct.csv");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(s.file_name());
        s.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        let back = OtocSeries::read_csv(&path).unwrap();
        assert_eq!(back.len(), 3);
        for (p, q) in back.iter().zip(&s.points) {
            assert_eq!((p.t, p.re_f, p.c), (q.t, q.re_f, q.c));
        }
        assert_eq!(s.points[0].c, 0.0);
    }
}
