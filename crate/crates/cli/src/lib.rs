//! Experiment driver: configuration, sweeps over initial basis states, quench
//! preparation, ablation runs, numerical checks and result files.

pub mod checks;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{Ablation, ExperimentConfig, GeneratorMode, ModelConfig, SweepMode};
pub use error::{CliError, CliResult};
pub use experiment::{
    prepare_metastable_tfim, run_basis_sweep, run_comparison, Classifier, Comparison, Label, Model,
    QuenchOutcome, References, RunMode, SweepEntry, SweepResult,
};
pub use output::emit_results;
