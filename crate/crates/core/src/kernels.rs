//! Stride kernels over amplitude pairs.
//!
//! A gate on a qubit with bit stride `s` couples amplitudes `i` and `i | s`
//! for every `i` with that bit clear. Controls restrict the pairs to indices
//! matching a mask.

use num_complex::Complex64;

use crate::circuit::Gate;
use crate::parallel::{ExecMode, REDUCE_CHUNK};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Pair selection: only low indices `i` with `i & mask == value` are touched.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Cond {
    pub mask: usize,
    pub value: usize,
}

impl Cond {
    pub fn and(self, bit: usize, set: bool) -> Cond {
        Cond { mask: self.mask | bit, value: if set { self.value | bit } else { self.value & !bit } }
    }

    #[inline(always)]
    fn admits(self, i: usize) -> bool {
        i & self.mask == self.value
    }
}

#[inline(always)]
fn pair_block<F>(base: usize, lo: &mut [Complex64], hi: &mut [Complex64], cond: Cond, f: &F)
where
    F: Fn(&mut Complex64, &mut Complex64),
{
    if cond.mask == 0 {
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    } else {
        for (l, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if cond.admits(base + l) {
                f(a, b);
            }
        }
    }
}

pub(crate) fn for_each_pair<F>(amps: &mut [Complex64], stride: usize, cond: Cond, mode: ExecMode, f: F)
where
    F: Fn(&mut Complex64, &mut Complex64) + Sync + Send,
{
    let block = 2 * stride;
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        let blocks = amps.len() / block;
        if blocks >= 64 {
            amps.par_chunks_mut(block).with_min_len((4096 / block).max(1)).enumerate().for_each(|(k, chunk)| {
                let (lo, hi) = chunk.split_at_mut(stride);
                pair_block(k * block, lo, hi, cond, &f);
            });
        } else {
            for (k, chunk) in amps.chunks_mut(block).enumerate() {
                let (lo, hi) = chunk.split_at_mut(stride);
                let base = k * block;
                lo.par_chunks_mut(1024)
                    .zip(hi.par_chunks_mut(1024))
                    .enumerate()
                    .for_each(|(c, (l, h))| pair_block(base + c * 1024, l, h, cond, &f));
            }
        }
        return;
    }
    let _ = mode;
    for (k, chunk) in amps.chunks_mut(block).enumerate() {
        let (lo, hi) = chunk.split_at_mut(stride);
        pair_block(k * block, lo, hi, cond, &f);
    }
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// `FRAC_1_SQRT_2 - 1/sqrt(2)`. The rounded constant alone grows the norm
/// by about 1e-16 per Hadamard, which is visible after ~1e6 gates.
#[inline]
fn h_residual() -> f64 {
    FRAC_1_SQRT_2.mul_add(FRAC_1_SQRT_2, -0.5) / (2.0 * FRAC_1_SQRT_2)
}

/// `z / sqrt(2)` with a single rounding per component.
#[inline(always)]
fn scale_fused(z: Complex64, lo: f64) -> Complex64 {
    Complex64::new(z.re.mul_add(FRAC_1_SQRT_2, -z.re * lo), z.im.mul_add(FRAC_1_SQRT_2, -z.im * lo))
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Bit stride of a 1-based qubit in a `width`-qubit register.
#[inline]
pub(crate) fn stride(width: usize, qubit: usize) -> usize {
    1 << (width - qubit)
}

pub(crate) fn apply_gate(amps: &mut [Complex64], width: usize, gate: &Gate, cond: Cond, mode: ExecMode) {
    match gate {
        Gate::H(q) => {
            let lo = h_residual();
            for_each_pair(amps, stride(width, *q), cond, mode, move |a, b| {
                let (s, d) = (*a + *b, *a - *b);
                *a = scale_fused(s, lo);
                *b = scale_fused(d, lo);
            })
        }
        Gate::X(q) => for_each_pair(amps, stride(width, *q), cond, mode, std::mem::swap),
        Gate::S(q) => for_each_pair(amps, stride(width, *q), cond, mode, |_, b| *b *= I),
        Gate::Sdag(q) => for_each_pair(amps, stride(width, *q), cond, mode, |_, b| *b *= -I),
        Gate::Rx { qubit, angle } => {
            // cos - 1 = -2 sin^2(angle/4) keeps the identity part exact, so
            // small rotations repeated many times do not drift the norm.
            let q = (angle / 4.0).sin();
            let cm1 = -2.0 * q * q;
            let ms = Complex64::new(0.0, -(angle / 2.0).sin());
            for_each_pair(amps, stride(width, *qubit), cond, mode, move |a, b| {
                let (x, y) = (*a, *b);
                *a = x + (x * cm1 + y * ms);
                *b = y + (x * ms + y * cm1);
            })
        }
        Gate::Rz { qubit, angle } => {
            let lo = Complex64::from_polar(1.0, -angle / 2.0);
            let hi = lo.conj();
            for_each_pair(amps, stride(width, *qubit), cond, mode, move |a, b| {
                *a *= lo;
                *b *= hi;
            })
        }
        Gate::Cnot { control, target } => {
            let cond = cond.and(stride(width, *control), true);
            for_each_pair(amps, stride(width, *target), cond, mode, std::mem::swap)
        }
        Gate::Controlled { control, polarity, body } => {
            let cond = cond.and(stride(width, *control), polarity.bit());
            for g in body.gates() {
                apply_gate(amps, width, g, cond, mode);
            }
        }
    }
}

/// Sum of `f(i)` over `0..len` in fixed chunks, combined in order.
pub(crate) fn chunked_sum<F>(len: usize, mode: ExecMode, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let chunk_sum = |start: usize| -> Complex64 {
        (start..(start + REDUCE_CHUNK).min(len)).map(&f).sum()
    };
    let starts = (0..len).step_by(REDUCE_CHUNK);
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        let partials: Vec<Complex64> = starts.collect::<Vec<_>>().into_par_iter().map(chunk_sum).collect();
        return partials.into_iter().sum();
    }
    let _ = mode;
    starts.map(chunk_sum).sum()
}
