//! Synthesized exponentials against the dense matrix exponential.

use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::{dense_string, expm_hermitian, simulated_unitary, spectral_norm};
use crate::parallel::{batch_mode, map_jobs};
use crate::pauli::{PauliLetter, PauliString};
use crate::synth::{mask_of, synthesize_exponential};

use super::config::RunConfig;
use super::report::ExperimentReport;

pub const SYNTH_TOLERANCE: f64 = 1e-12;
pub const EXHAUSTIVE_SIZES: [usize; 3] = [1, 2, 3];
pub const ANGLES: [f64; 3] = [0.1, 0.7, -1.3];
pub const RANDOM_SIZES: [usize; 2] = [4, 5];
pub const RANDOM_STRINGS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthRow {
    pub word: String,
    pub theta: f64,
    pub class: String,
    pub gates: usize,
    pub cnots: usize,
    pub error: f64,
}

/// Every non-identity word of length `n`.
pub fn all_words(n: usize) -> Vec<PauliString> {
    let count = 4usize.pow(n as u32);
    (1..count)
        .map(|mut code| {
            let mut letters = vec![PauliLetter::I; n];
            for slot in letters.iter_mut().rev() {
                *slot = PauliLetter::ALL[code % 4];
                code /= 4;
            }
            PauliString::new(letters, 1.0).expect("non-empty")
        })
        .collect()
}

/// Random non-identity word with a random angle in `[-pi, pi)`.
pub fn random_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (PauliString, f64) {
    loop {
        let letters: Vec<PauliLetter> = (0..n).map(|_| PauliLetter::ALL[rng.random_range(0..4)]).collect();
        if letters.iter().any(|l| !l.is_identity()) {
            let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            return (PauliString::new(letters, 1.0).expect("non-empty"), theta);
        }
    }
}

/// Spectral-norm distance between the simulated circuit and `exp(-i theta sigma)`.
pub fn check_exponential(sigma: &PauliString, theta: f64) -> Result<SynthRow> {
    let synth = synthesize_exponential(sigma, theta)?;
    let (_, class) = mask_of(sigma)?;
    let reference = expm_hermitian(&dense_string(&sigma.with_coeff(1.0))?, theta)?;
    let error = spectral_norm(&(simulated_unitary(&synth.circuit)? - reference));
    let report = synth.circuit.depth_report();
    Ok(SynthRow {
        word: sigma.word(),
        theta,
        class: class.to_string(),
        gates: report.gate_count,
        cnots: report.cnot_count,
        error,
    })
}

pub fn synth_cases(seed: u64) -> Vec<(PauliString, f64)> {
    let mut cases: Vec<(PauliString, f64)> = EXHAUSTIVE_SIZES
        .iter()
        .flat_map(|&n| all_words(n))
        .flat_map(|w| ANGLES.iter().map(move |&t| (w.clone(), t)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &n in &RANDOM_SIZES {
        cases.extend((0..RANDOM_STRINGS).map(|_| random_word(n, &mut rng)));
    }
    cases
}

pub fn run_synthesis_check(config: &RunConfig) -> Result<(ExperimentReport, Vec<SynthRow>)> {
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    let mut report = ExperimentReport::new("synthcheck", config);
    let tolerance = config.tolerance.unwrap_or(SYNTH_TOLERANCE);
    let started = std::time::Instant::now();
    let rows = map_jobs(synth_cases(config.seed), batch_mode(), |(s, t)| check_exponential(&s, t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    report.timing.push(("synthesis check".into(), started.elapsed()));

    let mut w = csv::Writer::from_path(dir.join("synthcheck.csv"))?;
    w.write_record(["word", "theta", "class", "gates", "cnots", "error"])?;
    for r in &rows {
        w.write_record([r.word.clone(), r.theta.to_string(), r.class.clone(), r.gates.to_string(), r.cnots.to_string(), r.error.to_string()])?;
    }
    w.flush()?;
    report.files.push(super::report::FileEntry { path: "synthcheck.csv".into(), kind: "synthesis-check".into(), rows: rows.len() });
    let worst = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    report.metric("cases", rows.len() as f64);
    report.metric("max_error", worst);
    report.check_at_most("max spectral-norm error", worst, tolerance);
    report.finish(dir)?;
    Ok((report, rows))
}
