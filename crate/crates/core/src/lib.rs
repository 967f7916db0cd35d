//! Statevector simulation of out-of-time-order correlators in spin chains.
//!
//! Pauli-sum Hamiltonians are compiled into CNOT/rotation circuits by
//! Trotter-Suzuki product formulas, run on a dense statevector engine and
//! checked against exact diagonalization.

pub mod circuit;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod otoc;
pub mod parallel;
pub mod pauli;
pub mod statevector;
pub mod synth;
pub mod trotter;

mod kernels;

pub use circuit::{compose, Circuit, DepthReport, Gate, Polarity};
pub use error::{Error, Result};
pub use parallel::ExecMode;
pub use pauli::{build_ising_hamiltonian, IsingParams, PauliLetter, PauliString, PauliSumHamiltonian};
pub use statevector::{expect_pauli, norm_distance, Statevector};
pub use synth::{synthesize_exponential, ParityClass};
pub use otoc::{ButterflyConfig, Evolution, Method, OtocEngine, OtocPoint, OtocSeries};
pub use trotter::{evolution_circuit, trotter_step, Split, TrotterOrder, TrotterPlan};
