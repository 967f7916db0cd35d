//! Dense statevectors and exact expectation values.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::kernels::{self, Cond};
use crate::parallel::ExecMode;
use crate::pauli::{PauliLetter, PauliString};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Single-qubit product-state factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalState {
    Zero,
    One,
    Plus,
    Minus,
    /// (|0> + i|1>)/sqrt(2)
    PlusY,
    /// (|0> - i|1>)/sqrt(2)
    MinusY,
}

impl LocalState {
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            LocalState::Zero => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            LocalState::One => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            LocalState::Plus => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            LocalState::Minus => [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            LocalState::PlusY => [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            LocalState::MinusY => [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Preparation {
    AllZero,
    Ghz,
    /// One factor per qubit, qubit 1 first.
    Product(Vec<LocalState>),
    /// Normalized on load.
    Amplitudes(Vec<Complex64>),
}

/// `2^width` complex amplitudes; qubit 1 is the most significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn basis(width: usize, index: usize) -> Result<Self> {
        let dim = dim_of(width)?;
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} outside a {width}-qubit register")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { width, amps })
    }

    pub fn zero(width: usize) -> Result<Self> {
        Self::basis(width, 0)
    }

    pub fn from_amplitudes(width: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let dim = dim_of(width)?;
        if amps.len() != dim {
            return Err(Error::InvalidState(format!(
                "{} amplitudes given for a {width}-qubit register",
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(format!("amplitudes are not normalizable (norm {norm})")));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { width, amps })
    }

    /// Wraps amplitudes that are already normalized.
    pub(crate) fn from_raw(width: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << width);
        Self { width, amps }
    }

    pub fn prepare(prep: &Preparation, width: usize) -> Result<Self> {
        match prep {
            Preparation::AllZero => Self::zero(width),
            Preparation::Ghz => {
                let mut s = Self::zero(width)?;
                let last = s.amps.len() - 1;
                s.amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
                s.amps[last] += Complex64::new(FRAC_1_SQRT_2, 0.0);
                Ok(s)
            }
            Preparation::Product(locals) => {
                if locals.len() != width {
                    return Err(Error::InvalidState(format!(
                        "{} local states for a {width}-qubit register",
                        locals.len()
                    )));
                }
                let mut amps = vec![Complex64::new(1.0, 0.0)];
                for l in locals {
                    let [a0, a1] = l.amplitudes();
                    amps = amps.iter().flat_map(|&x| [x * a0, x * a1]).collect();
                }
                Ok(Self { width, amps })
            }
            Preparation::Amplitudes(amps) => Self::from_amplitudes(width, amps.clone()),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self` on the high qubits, `low` on the low qubits.
    pub fn tensor(&self, low: &Statevector) -> Result<Statevector> {
        let width = self.width + low.width;
        dim_of(width)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| low.amps.iter().map(move |&b| a * b))
            .collect();
        Ok(Statevector { width, amps })
    }

    /// Applies the circuit in place with the automatically chosen mode.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        self.apply_circuit_with(circuit, ExecMode::auto(self.width))
    }

    pub fn apply_circuit_with(&mut self, circuit: &Circuit, mode: ExecMode) -> Result<()> {
        if circuit.width() != self.width {
            return Err(Error::InvalidApplication { circuit: circuit.width(), state: self.width });
        }
        for g in circuit.gates() {
            kernels::apply_gate(&mut self.amps, self.width, g, Cond::default(), mode);
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.check_width(other)?;
        let (a, b) = (&self.amps, &other.amps);
        Ok(kernels::chunked_sum(a.len(), ExecMode::auto(self.width), |i| a[i].conj() * b[i]))
    }

    /// Applies a Pauli string (coefficient included) to the state.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Statevector> {
        if p.len() != self.width {
            return Err(Error::InvalidInput(format!(
                "{}-site Pauli string on a {}-qubit state",
                p.len(),
                self.width
            )));
        }
        let action = PauliAction::new(p);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            out[i ^ action.flip] = action.phase(i) * a;
        }
        Ok(Statevector { width: self.width, amps: out })
    }

    pub fn linear_combination(&self, a: Complex64, other: &Statevector, b: Complex64) -> Result<Statevector> {
        self.check_width(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(x, y)| a * x + b * y).collect();
        Ok(Statevector { width: self.width, amps })
    }

    fn check_width(&self, other: &Statevector) -> Result<()> {
        if self.width != other.width {
            return Err(Error::InvalidInput(format!(
                "states of width {} and {} do not match",
                self.width, other.width
            )));
        }
        Ok(())
    }

    /// Little-endian dump: `u32` width, then (re, im) `f64` pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.width as u32).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let width = u32::from_le_bytes(word) as usize;
        let dim = dim_of(width)?;
        let mut amps = Vec::with_capacity(dim);
        let mut buf = [0u8; 16];
        for _ in 0..dim {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        Ok(Self { width, amps })
    }
}

fn dim_of(width: usize) -> Result<usize> {
    if width == 0 || width > 30 {
        return Err(Error::InvalidState(format!("unsupported register width {width}")));
    }
    Ok(1usize << width)
}

/// `p|i> = phase(i) |i ^ flip>` for a Pauli string `p`.
struct PauliAction {
    flip: usize,
    z_mask: usize,
    y_count: usize,
    coeff: f64,
}

impl PauliAction {
    fn new(p: &PauliString) -> Self {
        let n = p.len();
        let (mut flip, mut z_mask, mut y_count) = (0, 0, 0);
        for (k, &l) in p.letters().iter().enumerate() {
            let bit = 1 << (n - 1 - k);
            match l {
                PauliLetter::I => {}
                PauliLetter::X => flip |= bit,
                PauliLetter::Y => {
                    flip |= bit;
                    z_mask |= bit;
                    y_count += 1;
                }
                PauliLetter::Z => z_mask |= bit,
            }
        }
        Self { flip, z_mask, y_count, coeff: p.coeff() }
    }

    /// Y|b> = i(-1)^b |1-b>, Z|b> = (-1)^b |b>.
    #[inline]
    fn phase(&self, i: usize) -> Complex64 {
        let sign = if (i & self.z_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let ipow = match self.y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        ipow * (sign * self.coeff)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub value: f64,
    pub observable: String,
}

/// Imaginary parts below this are treated as rounding residue.
const IMAG_RESIDUE: f64 = 1e-12;
/// Imaginary parts above this indicate a bug.
const IMAG_FAILURE: f64 = 1e-9;

/// `<s|p|s>` evaluated by pairing amplitudes letter-wise.
pub fn expect_pauli(s: &Statevector, p: &PauliString) -> Result<ExpectationResult> {
    if p.len() != s.width {
        return Err(Error::InvalidInput(format!(
            "{}-site observable on a {}-qubit state",
            p.len(),
            s.width
        )));
    }
    let action = PauliAction::new(p);
    let amps = &s.amps;
    let z = kernels::chunked_sum(amps.len(), ExecMode::auto(s.width), |i| {
        amps[i ^ action.flip].conj() * action.phase(i) * amps[i]
    });
    if z.im.abs() > IMAG_FAILURE {
        return Err(Error::Consistency(format!("<{p}> has imaginary part {:e}", z.im)));
    }
    if z.im.abs() > IMAG_RESIDUE {
        log::debug!("<{p}> imaginary residue {:e}", z.im);
    }
    Ok(ExpectationResult { value: z.re, observable: p.to_string() })
}

/// Estimates a +/-1 observable from `shots` binomial draws of its exact
/// outcome probability.
pub fn sample_expectation<R: Rng + ?Sized>(exact: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidInput("need at least one shot".into()));
    }
    let p_plus = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
    let dist = Binomial::new(shots, p_plus).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let plus = dist.sample(rng) as f64;
    Ok(2.0 * plus / shots as f64 - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormDistance {
    pub raw: f64,
    /// Distance after multiplying `b` by the phase that best aligns it with `a`.
    pub aligned: f64,
}

pub fn norm_distance(a: &Statevector, b: &Statevector) -> Result<NormDistance> {
    a.check_width(b)?;
    let raw = diff_norm(&a.amps, &b.amps, Complex64::new(1.0, 0.0));
    let overlap = b.inner(a)?;
    let aligned = if overlap.norm() > 0.0 {
        diff_norm(&a.amps, &b.amps, overlap / overlap.norm())
    } else {
        raw
    };
    // The identity phase is one of the candidates.
    Ok(NormDistance { raw, aligned: aligned.min(raw) })
}

fn diff_norm(a: &[Complex64], b: &[Complex64], phase: Complex64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, Polarity};
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn preparations() {
        let h = FRAC_1_SQRT_2;
        let zero = Statevector::prepare(&Preparation::AllZero, 2).unwrap();
        assert_eq!(zero.amplitudes(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let ghz = Statevector::prepare(&Preparation::Ghz, 2).unwrap();
        assert!(close(ghz.amplitudes(), &[c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)], 1e-15));
        let y = Statevector::prepare(&Preparation::Product(vec![LocalState::PlusY]), 1).unwrap();
        assert!(close(y.amplitudes(), &[c(h, 0.), c(0., h)], 1e-15));
        let yy = y.apply_pauli(&PauliString::parse("Y", 1.0).unwrap()).unwrap();
        assert!(close(yy.amplitudes(), y.amplitudes(), 1e-15));
        let loaded = Statevector::prepare(&Preparation::Amplitudes(vec![c(3., 0.), c(0., 4.)]), 1).unwrap();
        assert!(close(loaded.amplitudes(), &[c(0.6, 0.), c(0., 0.8)], 1e-15));
        assert!(Statevector::prepare(&Preparation::Amplitudes(vec![c(0., 0.); 2]), 1).is_err());
        assert!(Statevector::prepare(&Preparation::Amplitudes(vec![c(1., 0.); 3]), 1).is_err());
        assert!(Statevector::prepare(&Preparation::Product(vec![LocalState::Zero]), 2).is_err());
    }

    #[test]
    fn basic_gates() {
        let h = FRAC_1_SQRT_2;
        let mut s = Statevector::zero(1).unwrap();
        s.apply_circuit(&Circuit::from_gates(1, vec![Gate::H(1)]).unwrap()).unwrap();
        assert!(close(s.amplitudes(), &[c(h, 0.), c(h, 0.)], 1e-15));

        let mut s = Statevector::basis(2, 0b10).unwrap();
        s.apply_circuit(&Circuit::from_gates(2, vec![Gate::Cnot { control: 1, target: 2 }]).unwrap())
            .unwrap();
        assert_eq!(s, Statevector::basis(2, 0b11).unwrap());

        let mut s = Statevector::zero(3).unwrap();
        assert!(matches!(
            s.apply_circuit(&Circuit::new(2)),
            Err(Error::InvalidApplication { circuit: 2, state: 3 })
        ));
    }

    #[test]
    fn controlled_polarity() {
        let body = Circuit::from_gates(2, vec![Gate::X(1)]).unwrap();
        for (control_bit, polarity, flips) in [
            (0, Polarity::OnOne, false),
            (1, Polarity::OnOne, true),
            (0, Polarity::OnZero, true),
            (1, Polarity::OnZero, false),
        ] {
            let circ = Circuit::from_gates(
                2,
                vec![Gate::Controlled { control: 2, polarity, body: body.clone() }],
            )
            .unwrap();
            let mut s = Statevector::basis(2, control_bit).unwrap();
            s.apply_circuit(&circ).unwrap();
            let expect = if flips { control_bit | 0b10 } else { control_bit };
            assert_eq!(s, Statevector::basis(2, expect).unwrap());
        }
    }

    #[test]
    fn expectations() {
        let z = PauliString::parse("Z", 1.0).unwrap();
        let x = PauliString::parse("X", 1.0).unwrap();
        assert_eq!(expect_pauli(&Statevector::zero(1).unwrap(), &z).unwrap().value, 1.0);
        let plus = Statevector::prepare(&Preparation::Product(vec![LocalState::Plus]), 1).unwrap();
        assert!((expect_pauli(&plus, &x).unwrap().value - 1.0).abs() < 1e-15);
        let ghz = Statevector::prepare(&Preparation::Ghz, 9).unwrap();
        let zz = PauliString::with_letters(9, &[(1, PauliLetter::Z), (9, PauliLetter::Z)], 1.0).unwrap();
        let r = expect_pauli(&ghz, &zz).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert_eq!(r.observable, "ZIIIIIIIZ");
        assert!(expect_pauli(&ghz, &z).is_err());
        let my = Statevector::prepare(&Preparation::Product(vec![LocalState::MinusY]), 1).unwrap();
        let y = PauliString::parse("Y", 1.0).unwrap();
        assert!((expect_pauli(&my, &y).unwrap().value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_distances() {
        let s = Statevector::prepare(&Preparation::Ghz, 3).unwrap();
        let d = norm_distance(&s, &s).unwrap();
        assert_eq!((d.raw, d.aligned), (0.0, 0.0));
        let d = norm_distance(&Statevector::basis(1, 0).unwrap(), &Statevector::basis(1, 1).unwrap()).unwrap();
        assert!((d.raw - 2f64.sqrt()).abs() < 1e-15);
        assert!((d.aligned - 2f64.sqrt()).abs() < 1e-15);
        let phased = s.linear_combination(c(0., 1.), &s, c(0., 0.)).unwrap();
        let d = norm_distance(&s, &phased).unwrap();
        assert!((d.raw - 2f64.sqrt()).abs() < 1e-14);
        assert!(d.aligned < 1e-15);
    }

    #[test]
    fn binary_round_trip() {
        let s = Statevector::prepare(&Preparation::Product(vec![LocalState::PlusY, LocalState::Minus]), 2).unwrap();
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 * 16);
        assert_eq!(&buf[..4], &2u32.to_le_bytes());
        assert_eq!(Statevector::read_binary(buf.as_slice()).unwrap(), s);
        assert!(Statevector::read_binary(&buf[..20]).is_err());
    }

    #[test]
    fn tensor_orders_high_then_low() {
        let one = Statevector::basis(1, 1).unwrap();
        let zero = Statevector::basis(2, 0).unwrap();
        assert_eq!(one.tensor(&zero).unwrap(), Statevector::basis(3, 0b100).unwrap());
    }

    #[test]
    fn sampling_is_seeded_and_unbiased() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let est = sample_expectation(0.3, 200_000, &mut rng).unwrap();
        assert!((est - 0.3).abs() < 0.01);
        assert_eq!(sample_expectation(1.0, 50, &mut rng).unwrap(), 1.0);
        assert!(sample_expectation(0.0, 0, &mut rng).is_err());
    }
}
