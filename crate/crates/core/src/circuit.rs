//! Gate-list circuits: composition, inversion, depth accounting and a
//! line-oriented text format.
//!
//! Qubits are 1-based; qubit 1 is the most significant bit of a basis index.
//! The text format has a `WIDTH <m>` header followed by one gate per line:
//!
//! ```text
//! WIDTH 10
//! H 10
//! CNOT 9 4
//! RX -0.002 9
//! CTRL 10 on1 {
//! X 3
//! }
//! ```

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    /// Body acts on the control-|1> subspace.
    OnOne,
    /// Body acts on the control-|0> subspace.
    OnZero,
}

impl Polarity {
    fn token(self) -> &'static str {
        match self {
            Polarity::OnOne => "on1",
            Polarity::OnZero => "on0",
        }
    }

    /// Basis bit value selected by this polarity.
    pub fn bit(self) -> bool {
        self == Polarity::OnOne
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    /// Phase gate diag(1, i).
    S(usize),
    /// diag(1, -i).
    Sdag(usize),
    X(usize),
    /// exp(-i angle X / 2).
    Rx { qubit: usize, angle: f64 },
    /// exp(-i angle Z / 2).
    Rz { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    /// `body` runs on the subspace where `control` matches `polarity`.
    /// The body has the same width as the enclosing circuit and never
    /// touches `control`.
    Controlled { control: usize, polarity: Polarity, body: Circuit },
}

impl Gate {
    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::H(q) => Gate::H(*q),
            Gate::S(q) => Gate::Sdag(*q),
            Gate::Sdag(q) => Gate::S(*q),
            Gate::X(q) => Gate::X(*q),
            Gate::Rx { qubit, angle } => Gate::Rx { qubit: *qubit, angle: -angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: *qubit, angle: -angle },
            Gate::Cnot { control, target } => Gate::Cnot { control: *control, target: *target },
            Gate::Controlled { control, polarity, body } => Gate::Controlled {
                control: *control,
                polarity: *polarity,
                body: body.invert(),
            },
        }
    }

    /// Every qubit the gate reads or writes, including controls and the
    /// full support of a controlled body.
    pub fn support(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdag(q) | Gate::X(q) => vec![*q],
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Controlled { control, body, .. } => {
                let mut qs = body.support();
                qs.push(*control);
                qs.sort_unstable();
                qs.dedup();
                qs
            }
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, Gate::Rx { .. } | Gate::Rz { .. })
    }

    fn validate(&self, width: usize) -> Result<()> {
        let in_range = |q: usize| q >= 1 && q <= width;
        match self {
            Gate::Rx { angle, .. } | Gate::Rz { angle, .. } if !angle.is_finite() => {
                return Err(Error::InvalidGate(format!("non-finite angle in {self:?}")));
            }
            Gate::Cnot { control, target } if control == target => {
                return Err(Error::InvalidGate(format!("CNOT control equals target ({control})")));
            }
            Gate::Controlled { control, body, .. } => {
                if body.width != width {
                    return Err(Error::InvalidGate(format!(
                        "controlled body has width {} inside a width-{width} circuit",
                        body.width
                    )));
                }
                if body.support().contains(control) {
                    return Err(Error::InvalidGate(format!("controlled body touches its control {control}")));
                }
            }
            _ => {}
        }
        match self.support().into_iter().find(|&q| !in_range(q)) {
            Some(q) => Err(Error::InvalidGate(format!("qubit {q} outside 1..={width}"))),
            None => Ok(()),
        }
    }

    fn relabeled(&self, map: &dyn Fn(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(map(*q)),
            Gate::S(q) => Gate::S(map(*q)),
            Gate::Sdag(q) => Gate::Sdag(map(*q)),
            Gate::X(q) => Gate::X(map(*q)),
            Gate::Rx { qubit, angle } => Gate::Rx { qubit: map(*qubit), angle: *angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: map(*qubit), angle: *angle },
            Gate::Cnot { control, target } => Gate::Cnot { control: map(*control), target: map(*target) },
            Gate::Controlled { control, polarity, body } => Gate::Controlled {
                control: map(*control),
                polarity: *polarity,
                body: Circuit {
                    width: body.width,
                    gates: body.gates.iter().map(|g| g.relabeled(map)).collect(),
                },
            },
        }
    }

    fn write_text(&self, out: &mut String) {
        // `{}` on f64 prints the shortest representation that round-trips.
        let _ = match self {
            Gate::H(q) => writeln!(out, "H {q}"),
            Gate::S(q) => writeln!(out, "S {q}"),
            Gate::Sdag(q) => writeln!(out, "SDG {q}"),
            Gate::X(q) => writeln!(out, "X {q}"),
            Gate::Rx { qubit, angle } => writeln!(out, "RX {angle} {qubit}"),
            Gate::Rz { qubit, angle } => writeln!(out, "RZ {angle} {qubit}"),
            Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
            Gate::Controlled { control, polarity, body } => {
                let _ = writeln!(out, "CTRL {control} {} {{", polarity.token());
                for g in &body.gates {
                    g.write_text(out);
                }
                writeln!(out, "}}")
            }
        };
    }
}

/// Ordered gate list over `width` qubits. The empty circuit is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self { width, gates: Vec::new() }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends the gates of `other`, which must have the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(Error::InvalidComposition { left: self.width, right: other.width });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self.gates.iter().flat_map(|g| g.support()).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// Reversed gate order with every gate replaced by its adjoint.
    pub fn invert(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Same gates on a wider register; qubit indices are unchanged.
    pub fn widened(&self, width: usize) -> Result<Circuit> {
        if width < self.width {
            return Err(Error::InvalidInput(format!("cannot narrow width {} to {width}", self.width)));
        }
        let widen = |g: &Gate| g.relabeled(&|q| q);
        let mut gates: Vec<Gate> = self.gates.iter().map(widen).collect();
        for g in &mut gates {
            set_body_width(g, width);
        }
        Ok(Circuit { width, gates })
    }

    /// Applies `perm[q - 1]` to every qubit index. `perm` must be a
    /// permutation of 1..=width.
    pub fn relabel(&self, perm: &[usize]) -> Result<Circuit> {
        let mut seen = vec![false; self.width];
        if perm.len() != self.width
            || !perm.iter().all(|&p| p >= 1 && p <= self.width && !std::mem::replace(&mut seen[p - 1], true))
        {
            return Err(Error::InvalidInput("relabeling is not a permutation".into()));
        }
        Ok(Circuit {
            width: self.width,
            gates: self.gates.iter().map(|g| g.relabeled(&|q| perm[q - 1])).collect(),
        })
    }

    /// Greedy ASAP layering: each gate lands in the first layer after every
    /// layer already occupying one of its qubits.
    pub fn depth_report(&self) -> DepthReport {
        self.repeated_depth_report(1)
    }

    /// Report for `times` back-to-back copies, without building them.
    pub fn repeated_depth_report(&self, times: usize) -> DepthReport {
        let mut layers = Layering::new(self.width);
        for _ in 0..times {
            layers.extend(&self.gates);
        }
        layers.report()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("WIDTH {}\n", self.width);
        for g in &self.gates {
            g.write_text(&mut out);
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Circuit> {
        let mut tokens = Tokens::new(text);
        let (line, head) = tokens.next().ok_or(Error::Parse { line: 1, msg: "missing WIDTH header".into() })?;
        if head != "WIDTH" {
            return Err(Error::Parse { line, msg: format!("expected WIDTH, found '{head}'") });
        }
        let width = tokens.number::<usize>()?;
        let gates = parse_gates(&mut tokens, width, false)?;
        Circuit::from_gates(width, gates)
    }
}

/// Incremental ASAP layering over a gate stream.
#[derive(Clone, Debug)]
pub struct Layering {
    frontier: Vec<usize>,
    report: DepthReport,
}

impl Layering {
    pub fn new(width: usize) -> Self {
        Self { frontier: vec![0; width + 1], report: DepthReport { gate_count: 0, cnot_count: 0, depth: 0 } }
    }

    pub fn extend<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) {
        for g in gates {
            let support = g.support();
            let layer = support.iter().map(|&q| self.frontier[q]).max().unwrap_or(0) + 1;
            for q in support {
                self.frontier[q] = layer;
            }
            self.report.depth = self.report.depth.max(layer);
            self.report.gate_count += 1;
            self.report.cnot_count += usize::from(matches!(g, Gate::Cnot { .. }));
        }
    }

    pub fn report(&self) -> DepthReport {
        self.report
    }
}

fn set_body_width(g: &mut Gate, width: usize) {
    if let Gate::Controlled { body, .. } = g {
        body.width = width;
        for inner in &mut body.gates {
            set_body_width(inner, width);
        }
    }
}

/// `a` then `b`; the resulting unitary is `U_b U_a`.
pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
    let mut out = a.clone();
    out.append(b)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub gate_count: usize,
    pub cnot_count: usize,
    pub depth: usize,
}

impl fmt::Display for DepthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "depth {} ({} gates, {} CNOT)", self.depth, self.gate_count, self.cnot_count)
    }
}

struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text.lines().enumerate().flat_map(|(k, l)| {
            let l = l.split('#').next().unwrap_or("");
            l.split_whitespace().map(move |t| (k + 1, t))
        });
        Self { inner: Box::new(inner), line: 1 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let tok = self.inner.next();
        if let Some((line, _)) = tok {
            self.line = line;
        }
        tok
    }

    fn word(&mut self) -> Result<&'a str> {
        self.next()
            .map(|(_, t)| t)
            .ok_or(Error::Parse { line: self.line, msg: "unexpected end of input".into() })
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T> {
        let t = self.word()?;
        t.parse()
            .map_err(|_| Error::Parse { line: self.line, msg: format!("bad number '{t}'") })
    }
}

fn parse_gates(tokens: &mut Tokens<'_>, width: usize, nested: bool) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    loop {
        let Some((line, op)) = tokens.next() else {
            if nested {
                return Err(Error::Parse { line: tokens.line, msg: "unterminated CTRL block".into() });
            }
            return Ok(gates);
        };
        let gate = match op {
            "}" if nested => return Ok(gates),
            "H" => Gate::H(tokens.number()?),
            "S" => Gate::S(tokens.number()?),
            "SDG" => Gate::Sdag(tokens.number()?),
            "X" => Gate::X(tokens.number()?),
            "RX" => {
                let angle = tokens.number()?;
                Gate::Rx { angle, qubit: tokens.number()? }
            }
            "RZ" => {
                let angle = tokens.number()?;
                Gate::Rz { angle, qubit: tokens.number()? }
            }
            "CNOT" => {
                let control = tokens.number()?;
                Gate::Cnot { control, target: tokens.number()? }
            }
            "CTRL" => {
                let control = tokens.number()?;
                let polarity = match tokens.word()? {
                    "on1" => Polarity::OnOne,
                    "on0" => Polarity::OnZero,
                    other => return Err(Error::Parse { line, msg: format!("bad polarity '{other}'") }),
                };
                if tokens.word()? != "{" {
                    return Err(Error::Parse { line, msg: "expected '{' after CTRL".into() });
                }
                let body = Circuit::from_gates(width, parse_gates(tokens, width, true)?)?;
                Gate::Controlled { control, polarity, body }
            }
            other => return Err(Error::Parse { line, msg: format!("unknown gate '{other}'") }),
        };
        gate.validate(width).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        gates.push(gate);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(width: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(width, gates).unwrap()
    }

    #[test]
    fn invert_reverses_and_adjoints() {
        assert!(Circuit::new(3).invert().is_empty());
        let r = c(3, vec![Gate::Rx { qubit: 3, angle: 0.7 }]);
        assert_eq!(r.invert().gates(), &[Gate::Rx { qubit: 3, angle: -0.7 }]);
        let mixed = c(2, vec![Gate::S(1), Gate::H(2), Gate::Rz { qubit: 1, angle: 0.3 }]);
        assert_eq!(
            mixed.invert().gates(),
            &[Gate::Rz { qubit: 1, angle: -0.3 }, Gate::H(2), Gate::Sdag(1)]
        );
        assert_eq!(mixed.invert().invert(), mixed);
    }

    #[test]
    fn compose_rules() {
        let a = c(2, vec![Gate::H(1)]);
        assert_eq!(compose(&Circuit::new(2), &a).unwrap(), a);
        let ab = compose(&a, &c(2, vec![Gate::X(2)])).unwrap();
        assert_eq!(ab.gates(), &[Gate::H(1), Gate::X(2)]);
        assert!(matches!(
            compose(&a, &Circuit::new(3)),
            Err(Error::InvalidComposition { left: 2, right: 3 })
        ));
    }

    #[test]
    fn validation() {
        let mut circ = Circuit::new(2);
        assert!(circ.push(Gate::H(3)).is_err());
        assert!(circ.push(Gate::H(0)).is_err());
        assert!(circ.push(Gate::Cnot { control: 1, target: 1 }).is_err());
        assert!(circ.push(Gate::Rx { qubit: 1, angle: f64::INFINITY }).is_err());
        let body = c(2, vec![Gate::X(2)]);
        assert!(circ
            .push(Gate::Controlled { control: 2, polarity: Polarity::OnOne, body: body.clone() })
            .is_err());
        assert!(circ.push(Gate::Controlled { control: 1, polarity: Polarity::OnOne, body }).is_ok());
    }

    #[test]
    fn depth_examples() {
        let r = c(2, vec![Gate::H(1), Gate::H(2)]).depth_report();
        assert_eq!((r.depth, r.gate_count), (1, 2));
        let r = c(2, vec![Gate::H(1), Gate::Cnot { control: 1, target: 2 }]).depth_report();
        assert_eq!((r.depth, r.cnot_count), (2, 1));
        // A later gate cannot slip ahead of an earlier one sharing a qubit.
        let r = c(2, vec![Gate::H(1), Gate::Cnot { control: 1, target: 2 }, Gate::H(2)]).depth_report();
        assert_eq!(r.depth, 3);
        let body = c(3, vec![Gate::X(1)]);
        let r = c(
            3,
            vec![Gate::H(2), Gate::Controlled { control: 3, polarity: Polarity::OnZero, body }, Gate::H(2)],
        )
        .depth_report();
        assert_eq!(r.depth, 2);
        assert_eq!(Circuit::new(4).depth_report().depth, 0);
    }

    #[test]
    fn relabel_checks_permutation() {
        let circ = c(3, vec![Gate::Cnot { control: 1, target: 3 }]);
        let moved = circ.relabel(&[2, 3, 1]).unwrap();
        assert_eq!(moved.gates(), &[Gate::Cnot { control: 2, target: 1 }]);
        assert!(circ.relabel(&[1, 1, 2]).is_err());
        assert!(circ.relabel(&[1, 2]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let body = c(10, vec![Gate::X(3), Gate::Cnot { control: 1, target: 2 }]);
        let circ = c(
            10,
            vec![
                Gate::H(1),
                Gate::Cnot { control: 9, target: 4 },
                Gate::Rx { qubit: 9, angle: -0.002 },
                Gate::Rz { qubit: 2, angle: 0.1 + 0.2 },
                Gate::S(5),
                Gate::Sdag(6),
                Gate::Controlled { control: 10, polarity: Polarity::OnOne, body },
            ],
        );
        let text = circ.to_text();
        assert!(text.contains("CNOT 9 4\n"));
        assert!(text.contains("RX -0.002 9\n"));
        assert!(text.contains("CTRL 10 on1 {\nX 3\n"));
        assert_eq!(Circuit::parse_text(&text).unwrap(), circ);
        let inline = "WIDTH 3 # header\nCTRL 3 on0 { X 1 } H 2";
        assert_eq!(Circuit::parse_text(inline).unwrap().len(), 2);
    }

    #[test]
    fn text_format_errors() {
        assert!(matches!(Circuit::parse_text("H 1"), Err(Error::Parse { .. })));
        assert!(matches!(Circuit::parse_text("WIDTH 2\nFOO 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Circuit::parse_text("WIDTH 2\nH 3"), Err(Error::Parse { line: 2, .. })));
        assert!(Circuit::parse_text("WIDTH 2\nCTRL 2 on1 {\nX 1\n").is_err());
        assert!(Circuit::parse_text("WIDTH 2\nRX abc 1").is_err());
    }
}
