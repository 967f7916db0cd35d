//! Experiment drivers behind the `otoc` command line tool. Each writes CSV
//! tables plus a `report.json` manifest into its output directory.

pub mod comparison;
pub mod config;
pub mod recipes;
pub mod report;
pub mod spreading;
pub mod synthcheck;
pub mod tradeoff;

pub use comparison::{run_state_comparison, ComparisonOutput, StateCurves};
pub use config::{EvolutionKind, RunConfig, TimeGrid, DEFAULT_GRID};
pub use recipes::{prepare_samples, prepare_state, ChainCouplings, PreparedState, StateRecipe};
pub use report::{load_report, verify_manifest, Check, ExperimentReport, FileEntry, Regime};
pub use spreading::{onset_time, run_spreading, window_stats, SpreadingOutput, SpreadingRun};
pub use synthcheck::{run_synthesis_check, SynthRow};
pub use tradeoff::{run_trotter_tradeoff, run_tradeoff_variants, TradeoffOutput, VariantSummary};
