//! Circuits for `exp(-i theta sigma)` with `sigma` a non-identity Pauli string.
//!
//! The string is conjugated into an I/X word `mu` by a single-qubit basis
//! change `tau` (`sigma = tau^dagger mu tau`), then a CNOT permutation `P`
//! maps `mu` onto `I^(n-1) X`, so that the whole exponential reduces to one
//! X rotation on qubit n:
//!
//! ```text
//! tau -> P -> RX(2 theta) on n -> P (reversed) -> tau^dagger
//! ```
//!
//! The permutation mask `x = (x_{n-2} .. x_0)` flags sites 1..n-1, with bit
//! `x_j` standing for site `n - j - 1`. Even-class networks (site n carries a
//! letter) are a product of `CNOT(n -> n-j-1)` over the set bits. Odd-class
//! networks wrap that core in `CNOT(n-m-1 -> n)` on both sides, `m` being the
//! highest set bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParityClass {
    Even,
    Odd,
    /// Only site n carries a letter; no CNOTs are needed.
    Trivial,
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityClass::Even => "even",
            ParityClass::Odd => "odd",
            ParityClass::Trivial => "trivial",
        })
    }
}

/// Binary word over sites 1..n-1; bit j is site n - j - 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SiteMask {
    n: usize,
    bits: u64,
}

impl SiteMask {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidSize(format!("mask over {n} sites")));
        }
        if n < 64 && bits >> (n.saturating_sub(1)) != 0 {
            return Err(Error::InvalidInput(format!("mask {bits:#b} has bits beyond site 1 of {n}")));
        }
        Ok(Self { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn bit(&self, j: usize) -> bool {
        (self.bits >> j) & 1 == 1
    }

    /// Site flagged by bit j.
    pub fn site_of(&self, j: usize) -> usize {
        self.n - j - 1
    }

    /// Highest set bit, the `m` of the odd-class network.
    pub fn highest(&self) -> Option<usize> {
        (self.bits != 0).then(|| 63 - self.bits.leading_zeros() as usize)
    }

    /// Flagged sites in increasing bit order (decreasing site order).
    pub fn flagged_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n.saturating_sub(1)).filter(|&j| self.bit(j)).map(|j| self.site_of(j))
    }
}

/// Sites 1..n-1 with a non-identity letter, and the network class.
pub fn mask_of(sigma: &PauliString) -> Result<(SiteMask, ParityClass)> {
    if sigma.is_identity() {
        return Err(Error::UnsupportedString(format!("{sigma} is the identity")));
    }
    let n = sigma.len();
    let mut bits = 0u64;
    for j in 0..n - 1 {
        if !sigma.letter(n - j - 1).is_identity() {
            bits |= 1 << j;
        }
    }
    let mask = SiteMask::new(n, bits)?;
    let class = if mask.is_zero() {
        ParityClass::Trivial
    } else if sigma.letter(n).is_identity() {
        ParityClass::Odd
    } else {
        ParityClass::Even
    };
    Ok((mask, class))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermutationNetwork {
    pub n: usize,
    pub class: ParityClass,
    /// (control, target) pairs in application order.
    pub cnots: Vec<(usize, usize)>,
}

impl PermutationNetwork {
    pub fn gates(&self) -> impl DoubleEndedIterator<Item = Gate> + '_ {
        self.cnots.iter().map(|&(control, target)| Gate::Cnot { control, target })
    }

    pub fn circuit(&self) -> Circuit {
        Circuit::from_gates(self.n, self.gates().collect()).expect("network CNOTs are in range")
    }
}

pub fn permutation_network(x: SiteMask, class: ParityClass, n: usize) -> Result<PermutationNetwork> {
    if x.n() != n {
        return Err(Error::InvalidInput(format!("mask over {} sites used for n = {n}", x.n())));
    }
    let expect_trivial = x.is_zero();
    if expect_trivial != (class == ParityClass::Trivial) {
        return Err(Error::InvalidInput(format!("mask {:#b} is inconsistent with class {class}", x.bits())));
    }
    let core = x.flagged_sites().map(|site| (n, site));
    let cnots = match class {
        ParityClass::Trivial => Vec::new(),
        ParityClass::Even => core.collect(),
        ParityClass::Odd => {
            let m = x.highest().expect("odd class has a set bit");
            let outer = (n - m - 1, n);
            std::iter::once(outer).chain(core).chain(std::iter::once(outer)).collect()
        }
    };
    Ok(PermutationNetwork { n, class, cnots })
}

/// Per-site basis change taking the I/X word `mu` to `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisChange {
    None,
    /// Z sites: `H X H = Z`.
    Hadamard,
    /// Y sites: `tau_Y = diag(1, -i)` with `tau_Y^dagger X tau_Y = Y`.
    TauY,
}

impl BasisChange {
    pub fn for_letter(letter: PauliLetter) -> Self {
        match letter {
            PauliLetter::Z => BasisChange::Hadamard,
            PauliLetter::Y => BasisChange::TauY,
            PauliLetter::X | PauliLetter::I => BasisChange::None,
        }
    }

    /// The gate `tau` applied before the permutation.
    pub fn gate(self, qubit: usize) -> Option<Gate> {
        match self {
            BasisChange::None => None,
            BasisChange::Hadamard => Some(Gate::H(qubit)),
            BasisChange::TauY => Some(Gate::Sdag(qubit)),
        }
    }
}

pub fn basis_change_layer(sigma: &PauliString) -> Vec<BasisChange> {
    sigma.letters().iter().map(|&l| BasisChange::for_letter(l)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesizedExponential {
    pub sigma: PauliString,
    pub theta: f64,
    pub circuit: Circuit,
}

/// Circuit realizing `exp(-i theta sigma)` exactly. The coefficient of
/// `sigma` is ignored; `theta` carries the full angle.
pub fn synthesize_exponential(sigma: &PauliString, theta: f64) -> Result<SynthesizedExponential> {
    if !theta.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite angle {theta}")));
    }
    let (mask, class) = mask_of(sigma)?;
    let n = sigma.len();
    let network = permutation_network(mask, class, n)?;
    let layer = basis_change_layer(sigma);

    let mut gates = Vec::with_capacity(2 * (n + network.cnots.len()) + 1);
    gates.extend(layer.iter().enumerate().filter_map(|(k, b)| b.gate(k + 1)));
    gates.extend(network.gates());
    gates.push(Gate::Rx { qubit: n, angle: 2.0 * theta });
    gates.extend(network.gates().rev());
    gates.extend(layer.iter().enumerate().filter_map(|(k, b)| b.gate(k + 1).map(|g| g.adjoint())).rev());

    Ok(SynthesizedExponential {
        sigma: sigma.clone(),
        theta,
        circuit: Circuit::from_gates(n, gates)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(w: &str) -> PauliString {
        PauliString::parse(w, 1.0).unwrap()
    }

    #[test]
    fn masks() {
        let (x, class) = mask_of(&p("IX")).unwrap();
        assert_eq!((x.bits(), class), (0, ParityClass::Trivial));
        let (x, class) = mask_of(&p("XX")).unwrap();
        assert_eq!((x.bits(), class), (1, ParityClass::Even));
        let (x, class) = mask_of(&p("XI")).unwrap();
        assert_eq!((x.bits(), class, x.highest()), (1, ParityClass::Odd, Some(0)));
        // Site 1 of four is bit n-2 = 2.
        let (x, class) = mask_of(&p("ZIYI")).unwrap();
        assert_eq!((x.bits(), class, x.highest()), (0b101, ParityClass::Odd, Some(2)));
        assert!(matches!(mask_of(&p("III")), Err(Error::UnsupportedString(_))));
    }

    #[test]
    fn networks() {
        let trivial = permutation_network(SiteMask::new(3, 0).unwrap(), ParityClass::Trivial, 3).unwrap();
        assert!(trivial.cnots.is_empty());
        let even = permutation_network(SiteMask::new(2, 1).unwrap(), ParityClass::Even, 2).unwrap();
        assert_eq!(even.cnots, vec![(2, 1)]);
        let odd = permutation_network(SiteMask::new(2, 1).unwrap(), ParityClass::Odd, 2).unwrap();
        assert_eq!(odd.cnots, vec![(1, 2), (2, 1), (1, 2)]);
        let odd = permutation_network(SiteMask::new(4, 0b101).unwrap(), ParityClass::Odd, 4).unwrap();
        assert_eq!(odd.cnots, vec![(1, 4), (4, 3), (4, 1), (1, 4)]);
        assert!(permutation_network(SiteMask::new(3, 0).unwrap(), ParityClass::Even, 3).is_err());
        assert!(permutation_network(SiteMask::new(3, 1).unwrap(), ParityClass::Even, 4).is_err());
        assert!(SiteMask::new(3, 0b100).is_err());
    }

    #[test]
    fn circuit_layout() {
        let e = synthesize_exponential(&p("ZY"), 0.25).unwrap();
        assert_eq!(
            e.circuit.gates(),
            &[
                Gate::H(1),
                Gate::Sdag(2),
                Gate::Cnot { control: 2, target: 1 },
                Gate::Rx { qubit: 2, angle: 0.5 },
                Gate::Cnot { control: 2, target: 1 },
                Gate::S(2),
                Gate::H(1),
            ]
        );
        assert!(synthesize_exponential(&p("II"), 0.1).is_err());
        assert!(synthesize_exponential(&p("Z"), f64::NAN).is_err());
    }

    #[test]
    fn even_class_cnots_all_touch_last_qubit() {
        for word in ["XXXX", "ZIYZ", "IIZX", "YZZY"] {
            let e = synthesize_exponential(&p(word), 0.3).unwrap();
            for g in e.circuit.gates() {
                if let Gate::Cnot { control, .. } = g {
                    assert_eq!(*control, 4, "{word}");
                }
            }
        }
    }
}
