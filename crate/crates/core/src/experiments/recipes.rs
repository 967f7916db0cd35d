use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{dense_hamiltonian, HermitianEigen};
use crate::pauli::build_ising_hamiltonian;
use crate::statevector::{LocalState, Preparation, Statevector};

fn one() -> usize {
    1
}

/// Initial-state recipes. `|up> = |0>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateRecipe {
    AllUp,
    /// Lowest eigenvector of the chain with `hX = 0`.
    GroundStateIntegrable,
    Ghz,
    /// Each site independently `|+y>` or `|-y>` with equal probability.
    RandomPmY {
        #[serde(default = "one")]
        samples: usize,
    },
    /// Exploratory, not a reproduction setting: the number of `|-y>` sites
    /// is a rounded Gaussian around n/2 (clamped to 0..=n), placed on a
    /// uniformly random subset of sites.
    RandomPmYHammingGaussian {
        #[serde(default = "one")]
        samples: usize,
        /// Defaults to sqrt(n)/2.
        #[serde(default)]
        sigma: Option<f64>,
    },
}

impl StateRecipe {
    pub fn standard_set() -> Vec<StateRecipe> {
        vec![
            StateRecipe::AllUp,
            StateRecipe::GroundStateIntegrable,
            StateRecipe::Ghz,
            StateRecipe::RandomPmY { samples: 1 },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            StateRecipe::AllUp => "all-up",
            StateRecipe::GroundStateIntegrable => "ground-state-integrable",
            StateRecipe::Ghz => "ghz",
            StateRecipe::RandomPmY { .. } => "random-pm-y",
            StateRecipe::RandomPmYHammingGaussian { .. } => "random-pm-y-hamming-gaussian",
        }
    }

    pub fn samples(&self) -> usize {
        match self {
            StateRecipe::RandomPmY { samples } | StateRecipe::RandomPmYHammingGaussian { samples, .. } => *samples,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples() == 0 {
            return Err(Error::Config(format!("{} needs at least one sample", self.name())));
        }
        if let StateRecipe::RandomPmYHammingGaussian { sigma: Some(s), .. } = self {
            if !(*s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("sigma must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StateRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match self.samples() {
            1 => Ok(()),
            k => write!(f, ":{k}"),
        }
    }
}

/// `name` or `name:samples`.
impl FromStr for StateRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, samples) = match s.split_once(':') {
            Some((n, k)) => (n, k.parse::<usize>().map_err(|_| Error::Config(format!("bad sample count in '{s}'")))?),
            None => (s, 1),
        };
        let r = match name {
            "all-up" => StateRecipe::AllUp,
            "ground-state-integrable" => StateRecipe::GroundStateIntegrable,
            "ghz" => StateRecipe::Ghz,
            "random-pm-y" => StateRecipe::RandomPmY { samples },
            "random-pm-y-hamming-gaussian" => StateRecipe::RandomPmYHammingGaussian { samples, sigma: None },
            _ => return Err(Error::Config(format!("unknown state recipe '{name}'"))),
        };
        if samples != 1 && r.samples() == 1 {
            return Err(Error::Config(format!("{name} takes no sample count")));
        }
        r.validate()?;
        Ok(r)
    }
}

/// Chain couplings the ground-state recipe diagonalizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainCouplings {
    pub coupling: f64,
    pub hz: f64,
}

impl Default for ChainCouplings {
    fn default() -> Self {
        Self { coupling: -1.0, hz: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct PreparedState {
    pub state: Statevector,
    /// Set when the ground space was degenerate and the lowest-index
    /// eigenvector was taken.
    pub degenerate: bool,
}

/// One state per sample. Each recipe draws from its own generator seeded by
/// `seed`, so adding recipes never changes the others.
pub fn prepare_samples(recipe: &StateRecipe, n: usize, couplings: ChainCouplings, seed: u64) -> Result<Vec<PreparedState>> {
    recipe.validate()?;
    let plain = |state| PreparedState { state, degenerate: false };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match recipe {
        StateRecipe::AllUp => Ok(vec![plain(Statevector::prepare(&Preparation::AllZero, n)?)]),
        StateRecipe::Ghz => Ok(vec![plain(Statevector::prepare(&Preparation::Ghz, n)?)]),
        StateRecipe::GroundStateIntegrable => {
            let h = build_ising_hamiltonian(n, couplings.coupling, couplings.hz, 0.0)?;
            let ground = HermitianEigen::new(&dense_hamiltonian(&h)?)?.ground_state();
            if ground.degenerate {
                log::warn!("degenerate ground space at E = {}; using the lowest-index eigenvector", ground.energy);
            }
            Ok(vec![PreparedState {
                state: Statevector::from_amplitudes(n, ground.vector)?,
                degenerate: ground.degenerate,
            }])
        }
        StateRecipe::RandomPmY { samples } => (0..*samples)
            .map(|_| {
                let locals = (0..n)
                    .map(|_| if rng.random_bool(0.5) { LocalState::PlusY } else { LocalState::MinusY })
                    .collect();
                Ok(plain(Statevector::prepare(&Preparation::Product(locals), n)?))
            })
            .collect(),
        StateRecipe::RandomPmYHammingGaussian { samples, sigma } => {
            let sigma = sigma.unwrap_or((n as f64).sqrt() / 2.0);
            let normal = Normal::new(n as f64 / 2.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
            (0..*samples)
                .map(|_| {
                    let weight = normal.sample(&mut rng).round().clamp(0.0, n as f64) as usize;
                    let mut locals = vec![LocalState::PlusY; n];
                    for k in sample(&mut rng, n, weight) {
                        locals[k] = LocalState::MinusY;
                    }
                    Ok(plain(Statevector::prepare(&Preparation::Product(locals), n)?))
                })
                .collect()
        }
    }
}

/// The first sample of a recipe, with default chain couplings.
pub fn prepare_state(recipe: &StateRecipe, n: usize, seed: u64) -> Result<Statevector> {
    Ok(prepare_samples(recipe, n, ChainCouplings::default(), seed)?.remove(0).state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{PauliLetter, PauliString};
    use crate::statevector::expect_pauli;
    use num_complex::Complex64;

    #[test]
    fn simple_recipes() {
        let s = prepare_state(&StateRecipe::AllUp, 2, 0).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        let g = prepare_state(&StateRecipe::Ghz, 3, 0).unwrap();
        assert!((g.amplitudes()[7].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn integrable_ground_state() {
        let p = prepare_samples(&StateRecipe::GroundStateIntegrable, 2, ChainCouplings::default(), 0).unwrap();
        // H = diag(1, 1, 1, -3): ground state |11>.
        assert!((p[0].state.amplitudes()[3].norm() - 1.0).abs() < 1e-12);
        assert!(!p[0].degenerate);
    }

    #[test]
    fn random_y_states_are_y_eigenstates() {
        for seed in 0..8 {
            let s = prepare_state(&StateRecipe::RandomPmY { samples: 1 }, 1, seed).unwrap();
            let y = expect_pauli(&s, &PauliString::single(1, 1, PauliLetter::Y, 1.0).unwrap()).unwrap();
            assert!((y.value.abs() - 1.0).abs() < 1e-14);
            assert_eq!(s, prepare_state(&StateRecipe::RandomPmY { samples: 1 }, 1, seed).unwrap());
        }
        let many = prepare_samples(&StateRecipe::RandomPmY { samples: 3 }, 4, ChainCouplings::default(), 1).unwrap();
        assert_eq!(many.len(), 3);
        let g = prepare_samples(
            &StateRecipe::RandomPmYHammingGaussian { samples: 2, sigma: Some(1.0) },
            5,
            ChainCouplings::default(),
            2,
        )
        .unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn recipe_parsing() {
        assert_eq!("random-pm-y:4".parse::<StateRecipe>().unwrap(), StateRecipe::RandomPmY { samples: 4 });
        assert!("ghz:2".parse::<StateRecipe>().is_err());
        assert!("random-pm-y:0".parse::<StateRecipe>().is_err());
        assert!("neel".parse::<StateRecipe>().is_err());
        let text = serde_json::to_string(&StateRecipe::RandomPmY { samples: 2 }).unwrap();
        assert_eq!(text, r#"{"kind":"random-pm-y","samples":2}"#);
    }
}
