//! Sweeps, quench preparation, unitary-vs-dissipative comparisons and the
//! classification of final states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use ssgd_core::linalg::CVector;
use ssgd_core::random::stream;
use ssgd_core::state::bitstring_index;
use ssgd_core::{
    build_brickwall, build_rydberg, build_standard, build_tfim, expectation, ground_state, neel_order, spin_flip,
    BrickwallSchedule, DenseOperator, DensityMatrix, GeneratorSet, Observers, Optimizer, RegisterLayout,
    SsgdConfig, TfimParams, Trajectory, TrajectoryRecord,
};

use crate::config::{Ablation, ExperimentConfig, GeneratorMode, ModelConfig};
use crate::error::{CliError, CliResult};

/// Largest system the sweep driver will simulate densely.
pub const MAX_SWEEP_QUBITS: usize = 10;

/// Néel magnitude separating the two Rydberg phases from "other".
pub const NEEL_THRESHOLD: f64 = 0.5;

/// Hamiltonian plus its exact ground state.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: ModelConfig,
    pub hamiltonian: DenseOperator,
    pub ground_energy: f64,
    pub ground_state: CVector,
}

impl Model {
    pub fn build(config: &ModelConfig) -> CliResult<Self> {
        let n = config.n_system();
        if n > MAX_SWEEP_QUBITS {
            return Err(ssgd_core::SsgdError::TooLarge(n).into());
        }
        let hamiltonian = match config {
            ModelConfig::Tfim(p) => build_tfim(p)?,
            ModelConfig::Rydberg(p) => build_rydberg(p)?,
        };
        let (ground_energy, ground_state) = ground_state(&hamiltonian);
        Ok(Self {
            config: *config,
            hamiltonian,
            ground_energy,
            ground_state,
        })
    }

    pub fn n_system(&self) -> usize {
        self.config.n_system()
    }
}

/// Generator set for iteration 0 and, in brickwall mode, the schedule.
#[derive(Debug, Clone)]
pub struct Generators {
    pub set: GeneratorSet,
    pub schedule: Option<BrickwallSchedule>,
}

pub fn build_generators(cfg: &ExperimentConfig) -> CliResult<Generators> {
    let n = cfg.model.n_system();
    let boundary = cfg.model.boundary();
    let g = &cfg.generator;
    Ok(match g.mode {
        GeneratorMode::Standard => Generators {
            set: build_standard(g.k, RegisterLayout::new(n, 1)?, boundary)?,
            schedule: None,
        },
        GeneratorMode::Brickwall => {
            let schedule = build_brickwall(n, boundary)?;
            Generators {
                set: schedule.gens_at_phase(0),
                schedule: Some(schedule),
            }
        }
        GeneratorMode::Custom => Generators {
            set: GeneratorSet::custom(&g.custom_list, RegisterLayout::new(n, 1)?)?,
            schedule: None,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    WithAncilla,
    UnitaryOnly,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::WithAncilla => "with_ancilla",
            RunMode::UnitaryOnly => "unitary_only",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "with_ancilla" => Some(RunMode::WithAncilla),
            "unitary_only" => Some(RunMode::UnitaryOnly),
            _ => None,
        }
    }

    pub fn from_ablation(a: Ablation) -> Vec<Self> {
        match a {
            Ablation::WithAncilla => vec![RunMode::WithAncilla],
            Ablation::UnitaryOnly => vec![RunMode::UnitaryOnly],
            Ablation::Both => vec![RunMode::WithAncilla, RunMode::UnitaryOnly],
        }
    }
}

/// One SSGD trajectory from a basis state. The RNG stream is keyed by the
/// basis index, so a given initial state draws the same noise in every mode
/// and every sweep that contains it.
pub fn run_trajectory(
    model: &Model,
    gens: &Generators,
    ssgd: &SsgdConfig,
    initial: &str,
    mode: RunMode,
) -> CliResult<Trajectory> {
    let rho0 = DensityMatrix::from_bitstring(initial)?;
    if rho0.layout().n_system() != model.n_system() {
        return Err(CliError::Config(format!(
            "initial state {initial:?} does not have {} sites",
            model.n_system()
        )));
    }
    let mut rng = stream(ssgd.seed, bitstring_index(initial)? as u64);
    let observers = Observers {
        neel: true,
        ground_state: Some(model.ground_state.clone()),
    };
    let mut opt = Optimizer::new(&model.hamiltonian, &gens.set, ssgd.clone()).with_observers(observers);
    if let Some(s) = &gens.schedule {
        opt = opt.with_schedule(s);
    }
    if mode == RunMode::UnitaryOnly {
        opt = opt.unitary_only();
    }
    Ok(opt.run_with_rng(&rho0, &mut rng)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Ground,
    Metastable,
    Other,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Ground => "ground",
            Label::Metastable => "metastable",
            Label::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ground" => Some(Label::Ground),
            "metastable" => Some(Label::Metastable),
            "other" => Some(Label::Other),
            _ => None,
        }
    }
}

/// How final states are labelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Classifier {
    /// Nearest reference energy; farther than three half-widths from both
    /// is "other".
    Energy {
        ground: f64,
        metastable: f64,
        half_width: f64,
    },
    /// Sign of the Néel order: negative is the ground phase.
    Neel { threshold: f64 },
}

impl Classifier {
    /// TFIM bands: half-width is a sixth of the ground/metastable gap.
    pub fn energy_bands(ground: f64, metastable: f64) -> Self {
        Classifier::Energy {
            ground,
            metastable,
            half_width: (metastable - ground).abs() / 6.0,
        }
    }

    pub fn classify(&self, energy: f64, neel: f64) -> Label {
        match *self {
            Classifier::Energy {
                ground,
                metastable,
                half_width,
            } => {
                let dg = (energy - ground).abs();
                let dm = (energy - metastable).abs();
                if dg.min(dm) > 3.0 * half_width {
                    Label::Other
                } else if dg <= dm {
                    Label::Ground
                } else {
                    Label::Metastable
                }
            }
            Classifier::Neel { threshold } => {
                if neel < -threshold {
                    Label::Ground
                } else if neel > threshold {
                    Label::Metastable
                } else {
                    Label::Other
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct References {
    pub ground: f64,
    /// TFIM only: metastable reference energy from the quench.
    pub metastable: Option<f64>,
    pub classifier: Classifier,
}

#[derive(Debug, Clone)]
pub struct QuenchOutcome {
    /// Relaxed state under `H(-h_z)`, converged or at the end of the budget.
    pub state: DensityMatrix,
    /// Its energy under `H(+h_z)`.
    pub energy: f64,
    /// Energy of the spin-flipped state under `H(+h_z)`, i.e. the metastable
    /// reference of `H(+h_z)`.
    pub metastable_energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `max_j |∂E/∂θ_j|` of the returned state under `H(-h_z)`.
    pub residual: f64,
}

impl QuenchOutcome {
    /// `F ρ F` with `F` the global spin flip.
    pub fn mirrored_state(&self) -> CliResult<DensityMatrix> {
        let n = self.state.layout().n_system();
        let f = spin_flip(n)?;
        let m = f.matrix() * self.state.matrix() * f.matrix();
        Ok(DensityMatrix::new(m, *self.state.layout())?)
    }
}

/// Quench preparation: relax the all-up product state under `H(-h_z)` with
/// noise off for at most `cfg.max_iters` steps, then evaluate it under `H(+h_z)`.
///
/// Away from `h_x = 0` the false vacuum sits on a very flat (sometimes weakly
/// unstable) direction, so the run usually ends on the budget rather than the
/// convergence test. `converged` and `residual` say which.
pub fn prepare_metastable_tfim(p: &TfimParams, gens: &Generators, cfg: &SsgdConfig) -> CliResult<QuenchOutcome> {
    if !(p.h_z > 0.0) {
        return Err(CliError::Config("quench needs a positive target h_z".into()));
    }
    let plus = build_tfim(p)?;
    let minus = build_tfim(&TfimParams { h_z: -p.h_z, ..*p })?;
    let cfg = cfg.clone().noiseless();
    let rho0 = DensityMatrix::from_bitstring(&"0".repeat(p.n_sites))?;
    let mut opt = Optimizer::new(&minus, &gens.set, cfg.clone());
    if let Some(s) = &gens.schedule {
        opt = opt.with_schedule(s);
    }
    let traj = opt.run(&rho0)?;
    let last = traj.records.last().expect("at least one record");
    let state = traj.final_state;
    Ok(QuenchOutcome {
        energy: expectation(&state, &plus)?,
        metastable_energy: expectation(&state, &minus)?,
        iterations: last.iter,
        converged: traj.converged,
        residual: last.grad_norm_system,
        state,
    })
}

/// Reference energies and the classification rule for a model.
pub fn references(cfg: &ExperimentConfig, model: &Model, gens: &Generators) -> CliResult<References> {
    match &model.config {
        ModelConfig::Tfim(p) => {
            let quench_cfg = SsgdConfig {
                max_iters: cfg.quench.max_iters,
                ..cfg.ssgd.clone()
            };
            let q = prepare_metastable_tfim(p, gens, &quench_cfg)?;
            Ok(References {
                ground: model.ground_energy,
                metastable: Some(q.metastable_energy),
                classifier: Classifier::energy_bands(model.ground_energy, q.metastable_energy),
            })
        }
        ModelConfig::Rydberg(_) => Ok(References {
            ground: model.ground_energy,
            metastable: None,
            classifier: Classifier::Neel {
                threshold: NEEL_THRESHOLD,
            },
        }),
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub initial: String,
    pub mode: RunMode,
    pub final_energy: f64,
    pub final_neel: f64,
    pub label: Label,
    pub converged: bool,
    pub records: Vec<TrajectoryRecord>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub references: References,
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn count(&self, label: Label) -> usize {
        self.entries.iter().filter(|e| e.label == label).count()
    }
}

/// Runs every requested initial state in every requested mode.
pub fn run_basis_sweep(cfg: &ExperimentConfig) -> CliResult<SweepResult> {
    cfg.validate()?;
    let model = Model::build(&cfg.model)?;
    let gens = build_generators(cfg)?;
    let references = references(cfg, &model, &gens)?;
    run_sweep_with(cfg, &model, &gens, references, &cfg.initial_states())
}

/// Sweep over `states` with precomputed references.
pub fn run_sweep_with(
    cfg: &ExperimentConfig,
    model: &Model,
    gens: &Generators,
    references: References,
    states: &[String],
) -> CliResult<SweepResult> {
    let modes = RunMode::from_ablation(cfg.sweep.ablation);
    let jobs: Vec<(&String, RunMode)> = states
        .iter()
        .flat_map(|s| modes.iter().map(move |m| (s, *m)))
        .collect();
    let classifier = references.classifier;
    let entries = jobs
        .par_iter()
        .map(|(initial, mode)| {
            let traj = run_trajectory(model, gens, &cfg.ssgd, initial, *mode)?;
            let final_energy = traj.final_energy();
            let final_neel = neel_order(&traj.final_state)?;
            Ok(SweepEntry {
                initial: (*initial).clone(),
                mode: *mode,
                final_energy,
                final_neel,
                label: classifier.classify(final_energy, final_neel),
                converged: traj.converged,
                records: traj.records,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SweepResult { references, entries })
}

/// Paired trajectories from one initial state, with and without the ancilla.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub initial: String,
    pub with_ancilla: Vec<TrajectoryRecord>,
    pub unitary_only: Vec<TrajectoryRecord>,
}

impl Comparison {
    /// Rows `(iter, E_with_ancilla, E_unitary_only)`; a side that stopped
    /// early has no value.
    pub fn aligned(&self) -> Vec<(usize, Option<f64>, Option<f64>)> {
        let len = self.with_ancilla.len().max(self.unitary_only.len());
        (0..len)
            .map(|i| {
                (
                    i,
                    self.with_ancilla.get(i).map(|r| r.energy),
                    self.unitary_only.get(i).map(|r| r.energy),
                )
            })
            .collect()
    }
}

pub fn run_comparison(cfg: &ExperimentConfig, initial: &str) -> CliResult<Comparison> {
    cfg.validate()?;
    let model = Model::build(&cfg.model)?;
    let gens = build_generators(cfg)?;
    let (a, b) = rayon::join(
        || run_trajectory(&model, &gens, &cfg.ssgd, initial, RunMode::WithAncilla),
        || run_trajectory(&model, &gens, &cfg.ssgd, initial, RunMode::UnitaryOnly),
    );
    Ok(Comparison {
        initial: initial.to_string(),
        with_ancilla: a?.records,
        unitary_only: b?.records,
    })
}
