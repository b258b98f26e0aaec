//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ssgd_core::{Boundary, RydbergParams, SsgdConfig, TfimParams};

use crate::error::{CliError, CliResult};

/// Overrides `[output] dir` when set.
pub const OUTPUT_DIR_ENV: &str = "SSGD_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub generator: GeneratorConfig,
    #[serde(default)]
    pub ssgd: SsgdConfig,
    #[serde(default)]
    pub quench: QuenchConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Tfim(TfimParams),
    Rydberg(RydbergParams),
}

impl ModelConfig {
    pub fn n_system(&self) -> usize {
        match self {
            ModelConfig::Tfim(p) => p.n_sites,
            ModelConfig::Rydberg(p) => p.n_atoms,
        }
    }

    /// Boundary used for generator windows. The Rydberg array is a ring.
    pub fn boundary(&self) -> Boundary {
        match self {
            ModelConfig::Tfim(p) => p.boundary,
            ModelConfig::Rydberg(_) => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorMode {
    #[default]
    Standard,
    Brickwall,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub mode: GeneratorMode,
    pub k: usize,
    /// Words on one ancilla (qubit 0) plus the system, e.g. `+1*X0.Z2`.
    pub custom_list: Vec<String>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            mode: GeneratorMode::Standard,
            k: 2,
            custom_list: Vec::new(),
        }
    }
}

/// Budget for preparing the TFIM metastable reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuenchConfig {
    pub max_iters: usize,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        Self { max_iters: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    #[default]
    AllBasisStates,
    ListedStates,
    SingleState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    #[default]
    WithAncilla,
    UnitaryOnly,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: SweepMode,
    /// Initial bitstrings for `listed_states` / `single_state`.
    pub states: Vec<String>,
    pub ablation: Ablation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("ssgd-out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> CliResult<()> {
        match &self.model {
            ModelConfig::Tfim(p) => p.validate()?,
            ModelConfig::Rydberg(p) => p.validate()?,
        }
        self.ssgd.validate()?;
        let n = self.model.n_system();
        if self.generator.mode == GeneratorMode::Custom && self.generator.custom_list.is_empty() {
            return Err(CliError::Config("generator.custom_list is empty".into()));
        }
        if self.quench.max_iters == 0 {
            return Err(CliError::Config("quench.max_iters must be at least 1".into()));
        }
        for s in &self.sweep.states {
            if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
                return Err(CliError::Config(format!(
                    "initial state {s:?} is not a bitstring of length {n}"
                )));
            }
        }
        match self.sweep.mode {
            SweepMode::SingleState if self.sweep.states.len() != 1 => Err(CliError::Config(
                "single_state sweeps take exactly one entry in sweep.states".into(),
            )),
            SweepMode::ListedStates if self.sweep.states.is_empty() => {
                Err(CliError::Config("listed_states sweep has no states".into()))
            }
            _ => Ok(()),
        }
    }

    /// `[output] dir`, unless the environment overrides it.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output.dir.clone(),
        }
    }

    /// Initial bitstrings in sweep order.
    pub fn initial_states(&self) -> Vec<String> {
        let n = self.model.n_system();
        match self.sweep.mode {
            SweepMode::AllBasisStates => (0..1usize << n)
                .map(|i| ssgd_core::state::index_bitstring(i, n))
                .collect(),
            _ => self.sweep.states.clone(),
        }
    }
}
