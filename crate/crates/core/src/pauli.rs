//! Pauli strings and weighted Pauli-sum Hamiltonians.
//!
//! Sites are 1-based. Site 1 is the leftmost Kronecker factor, which is the
//! most significant bit of a computational-basis index.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    /// Row-major 2x2 matrix, with `Y = [[0, -i], [i, 0]]`.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            PauliLetter::I => [[ONE, ZERO], [ZERO, ONE]],
            PauliLetter::X => [[ZERO, ONE], [ONE, ZERO]],
            PauliLetter::Y => [[ZERO, -I], [I, ZERO]],
            PauliLetter::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn is_identity(self) -> bool {
        self == PauliLetter::I
    }

    /// True when the letter has off-diagonal support (X or Y).
    pub fn flips(self) -> bool {
        matches!(self, PauliLetter::X | PauliLetter::Y)
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A length-n word over {I, X, Y, Z} with a real coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
    coeff: f64,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>, coeff: f64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidSize("a Pauli string needs at least one site".into()));
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite coefficient {coeff}")));
        }
        Ok(Self { letters, coeff })
    }

    /// Parses a word such as `"ZZI"`.
    pub fn parse(word: &str, coeff: f64) -> Result<Self> {
        let letters = word
            .chars()
            .map(|c| {
                PauliLetter::from_char(c)
                    .ok_or_else(|| Error::InvalidInput(format!("'{c}' is not a Pauli letter")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters, coeff)
    }

    pub fn identity(n: usize, coeff: f64) -> Result<Self> {
        Self::new(vec![PauliLetter::I; n], coeff)
    }

    /// String with `letter` on one site and identity elsewhere.
    pub fn single(n: usize, site: usize, letter: PauliLetter, coeff: f64) -> Result<Self> {
        Self::with_letters(n, &[(site, letter)], coeff)
    }

    pub fn with_letters(n: usize, sites: &[(usize, PauliLetter)], coeff: f64) -> Result<Self> {
        let mut letters = vec![PauliLetter::I; n];
        for &(site, letter) in sites {
            if site == 0 || site > n {
                return Err(Error::InvalidInput(format!("site {site} outside 1..={n}")));
            }
            letters[site - 1] = letter;
        }
        Self::new(letters, coeff)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    /// Letter on a 1-based site.
    pub fn letter(&self, site: usize) -> PauliLetter {
        self.letters[site - 1]
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn with_coeff(&self, coeff: f64) -> Self {
        Self { letters: self.letters.clone(), coeff }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|l| l.is_identity())
    }

    /// True when every letter is I or Z.
    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|l| matches!(l, PauliLetter::I | PauliLetter::Z))
    }

    pub fn word(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }

    /// Sites (1-based) carrying a non-identity letter.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_identity())
            .map(|(k, _)| k + 1)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 1.0)
    }
}

/// Two strings commute iff they anticommute on an even number of sites.
pub fn strings_commute(a: &PauliString, b: &PauliString) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "cannot compare strings of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let anticommuting = a
        .letters
        .iter()
        .zip(&b.letters)
        .filter(|(x, y)| !x.is_identity() && !y.is_identity() && x != y)
        .count();
    Ok(anticommuting % 2 == 0)
}

/// Coupling constants of the open-boundary Ising chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "hZ")]
    pub hz: f64,
    #[serde(rename = "hX")]
    pub hx: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliSumHamiltonian {
    n: usize,
    terms: Vec<PauliString>,
    params: Option<IsingParams>,
}

impl PauliSumHamiltonian {
    /// Explicit term list. Zero-coefficient terms are dropped.
    pub fn from_terms(n: usize, terms: Vec<PauliString>) -> Result<Self> {
        Self::assemble(n, terms, None)
    }

    fn assemble(n: usize, terms: Vec<PauliString>, params: Option<IsingParams>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("a Hamiltonian needs at least one site".into()));
        }
        if let Some(bad) = terms.iter().find(|t| t.len() != n) {
            return Err(Error::InvalidInput(format!(
                "term {bad} has length {} but the Hamiltonian has {n} sites",
                bad.len()
            )));
        }
        let terms: Vec<_> = terms.into_iter().filter(|t| t.coeff() != 0.0).collect();
        if terms.is_empty() {
            return Err(Error::InvalidInput("Hamiltonian has no nonzero terms".into()));
        }
        Ok(Self { n, terms, params })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn params(&self) -> Option<IsingParams> {
        self.params
    }

    /// Diagonal (I/Z-only) terms and the rest, each in term order.
    pub fn split_diagonal(&self) -> (Vec<&PauliString>, Vec<&PauliString>) {
        self.terms.iter().partition(|t| t.is_diagonal())
    }

    /// True when every pair of terms commutes.
    pub fn terms_commute(&self) -> bool {
        self.terms.iter().enumerate().all(|(k, a)| {
            self.terms[k + 1..]
                .iter()
                .all(|b| strings_commute(a, b).unwrap_or(false))
        })
    }

    pub fn to_spec(&self) -> HamiltonianSpec {
        match self.params {
            Some(p) => HamiltonianSpec { n: self.n, j: Some(p.j), hz: Some(p.hz), hx: Some(p.hx), terms: None },
            None => HamiltonianSpec {
                n: self.n,
                j: None,
                hz: None,
                hx: None,
                terms: Some(
                    self.terms
                        .iter()
                        .map(|t| TermSpec { letters: t.word(), coeff: t.coeff() })
                        .collect(),
                ),
            },
        }
    }

    pub fn from_spec(spec: &HamiltonianSpec) -> Result<Self> {
        match &spec.terms {
            Some(terms) => {
                let terms = terms
                    .iter()
                    .map(|t| PauliString::parse(&t.letters, t.coeff))
                    .collect::<Result<Vec<_>>>()?;
                Self::from_terms(spec.n, terms)
            }
            None => match (spec.j, spec.hz, spec.hx) {
                (Some(j), Some(hz), Some(hx)) => build_ising_hamiltonian(spec.n, j, hz, hx),
                _ => Err(Error::InvalidInput(
                    "Ising Hamiltonian spec needs J, hZ and hX (or an explicit term list)".into(),
                )),
            },
        }
    }
}

/// `H = J sum Z_i Z_{i+1} + hZ sum Z_i + hX sum X_i` with open boundaries.
///
/// Terms are ordered ZZ bonds left to right, then Z fields, then X fields.
pub fn build_ising_hamiltonian(n: usize, j: f64, hz: f64, hx: f64) -> Result<PauliSumHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("an Ising chain needs n >= 2, got {n}")));
    }
    let mut terms = Vec::with_capacity(3 * n);
    for k in 1..n {
        terms.push(PauliString::with_letters(n, &[(k, PauliLetter::Z), (k + 1, PauliLetter::Z)], j)?);
    }
    for k in 1..=n {
        terms.push(PauliString::single(n, k, PauliLetter::Z, hz)?);
    }
    for k in 1..=n {
        terms.push(PauliString::single(n, k, PauliLetter::X, hx)?);
    }
    PauliSumHamiltonian::assemble(n, terms, Some(IsingParams { j, hz, hx }))
}

/// JSON document describing a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n: usize,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(rename = "hZ", default, skip_serializing_if = "Option::is_none")]
    pub hz: Option<f64>,
    #[serde(rename = "hX", default, skip_serializing_if = "Option::is_none")]
    pub hx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub letters: String,
    pub coeff: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(h: &PauliSumHamiltonian) -> Vec<(String, f64)> {
        h.terms().iter().map(|t| (t.word(), t.coeff())).collect()
    }

    #[test]
    fn ising_three_sites() {
        let h = build_ising_hamiltonian(3, -1.0, 1.0, 1.0).unwrap();
        let expected = [
            ("ZZI", -1.0),
            ("IZZ", -1.0),
            ("ZII", 1.0),
            ("IZI", 1.0),
            ("IIZ", 1.0),
            ("XII", 1.0),
            ("IXI", 1.0),
            ("IIX", 1.0),
        ];
        let got = words(&h);
        assert_eq!(got.len(), 8);
        for ((w, c), (ew, ec)) in got.iter().zip(expected) {
            assert_eq!(w, ew);
            assert_eq!(*c, ec);
        }
    }

    #[test]
    fn degenerate_parameters_drop_zero_terms() {
        let h = build_ising_hamiltonian(2, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(words(&h), vec![("XI".to_string(), 1.0), ("IX".to_string(), 1.0)]);
    }

    #[test]
    fn term_count_formula() {
        for n in 2..8 {
            for &(j, hz, hx) in &[(-1.0, 1.0, 1.0), (-1.0, 1.0, 0.0), (0.0, 1.0, 1.0), (2.0, 0.0, 0.0)] {
                let h = build_ising_hamiltonian(n, j, hz, hx).unwrap();
                let expect = (n - 1) * usize::from(j != 0.0)
                    + n * usize::from(hz != 0.0)
                    + n * usize::from(hx != 0.0);
                assert_eq!(h.terms().len(), expect);
            }
        }
    }

    #[test]
    fn integrable_chain_has_seventeen_commuting_terms() {
        let h = build_ising_hamiltonian(9, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(h.terms().len(), 17);
        assert!(h.terms_commute());
    }

    #[test]
    fn rejects_short_chain_and_empty_hamiltonian() {
        assert!(matches!(build_ising_hamiltonian(1, 1.0, 1.0, 1.0), Err(Error::InvalidSize(_))));
        assert!(build_ising_hamiltonian(3, 0.0, 0.0, 0.0).is_err());
        let bad = PauliString::parse("ZZ", 1.0).unwrap();
        assert!(PauliSumHamiltonian::from_terms(3, vec![bad]).is_err());
    }

    #[test]
    fn commutation_rule() {
        let p = |w: &str| PauliString::parse(w, 1.0).unwrap();
        assert!(strings_commute(&p("ZZ"), &p("ZI")).unwrap());
        assert!(!strings_commute(&p("XI"), &p("ZI")).unwrap());
        assert!(strings_commute(&p("XZ"), &p("ZX")).unwrap());
        assert!(strings_commute(&p("XY"), &p("ZZ")).is_ok());
        assert!(strings_commute(&p("X"), &p("XX")).is_err());
    }

    #[test]
    fn parse_and_display() {
        let s: PauliString = "xYzI".parse().unwrap();
        assert_eq!(s.to_string(), "XYZI");
        assert_eq!(s.support().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(PauliString::parse("XQ", 1.0).is_err());
        assert!(PauliString::parse("", 1.0).is_err());
        assert!(PauliString::parse("X", f64::NAN).is_err());
        assert!(PauliString::identity(3, 2.0).unwrap().is_identity());
    }

    #[test]
    fn spec_round_trip() {
        let h = build_ising_hamiltonian(4, -1.0, 1.0, 0.5).unwrap();
        let json = serde_json::to_string(&h.to_spec()).unwrap();
        assert!(json.contains("\"J\":-1.0"));
        let back = PauliSumHamiltonian::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, h);

        let custom = r#"{"n": 2, "terms": [{"letters": "XY", "coeff": 0.5}, {"letters": "ZZ", "coeff": 0.0}]}"#;
        let h = PauliSumHamiltonian::from_spec(&serde_json::from_str(custom).unwrap()).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.params(), None);
        let again = PauliSumHamiltonian::from_spec(&h.to_spec()).unwrap();
        assert_eq!(again, h);

        let incomplete = r#"{"n": 3, "J": 1.0}"#;
        assert!(PauliSumHamiltonian::from_spec(&serde_json::from_str(incomplete).unwrap()).is_err());
    }
}
