//! The state-space gradient descent loop.
//!
//! Each iteration attaches a fresh ancilla in `|0>`, measures the energy
//! gradient over the system generators and the Hessian over the
//! ancilla-coupled generators, applies one joint exponential
//! `exp(-i(θ_S·G_S + θ_A·G_A))`, and traces the ancilla back out.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsgdError};
use crate::generators::{build_standard, flips_ancilla, BrickwallSchedule, GeneratorSet};
use crate::linalg::{self, CVector, ZERO};
use crate::models::{neel_order, Boundary};
use crate::pauli::{PauliString, RegisterLayout};
use crate::random::{self, SimRng};
use crate::state::{self, attach_ancilla, reset_ancilla, DenseOperator, DensityMatrix};

/// Variance of the Gaussian noise added to each system-gradient component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// `σ² = δt_S`.
    Paper,
    Fixed(f64),
    Off,
}

impl NoiseMode {
    pub fn variance(&self, step_system: f64) -> f64 {
        match *self {
            NoiseMode::Paper => step_system,
            NoiseMode::Fixed(v) => v,
            NoiseMode::Off => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsgdConfig {
    pub max_iters: usize,
    pub step_system: f64,
    pub step_ancilla: f64,
    pub noise: NoiseMode,
    /// Optional variance of symmetric Gaussian noise on each Hessian entry.
    pub hessian_noise: Option<f64>,
    pub e_tol: f64,
    pub seed: u64,
    pub convergence_grad_tol: f64,
    pub convergence_window: usize,
}

impl Default for SsgdConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            step_system: 0.05,
            step_ancilla: 0.05,
            noise: NoiseMode::Paper,
            hessian_noise: None,
            e_tol: 1e-3,
            seed: 0,
            convergence_grad_tol: 1e-4,
            convergence_window: 5,
        }
    }
}

impl SsgdConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SsgdError::InvalidParameter(m.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.step_system > 0.0 && self.step_system.is_finite()) {
            return bad("step_system must be positive");
        }
        if !(self.step_ancilla > 0.0 && self.step_ancilla.is_finite()) {
            return bad("step_ancilla must be positive");
        }
        if !(self.e_tol >= 0.0 && self.e_tol.is_finite()) {
            return bad("e_tol must be non-negative");
        }
        if let NoiseMode::Fixed(v) = self.noise {
            if !(v >= 0.0 && v.is_finite()) {
                return bad("noise variance must be non-negative");
            }
        }
        if let Some(v) = self.hessian_noise {
            if !(v >= 0.0 && v.is_finite()) {
                return bad("Hessian noise variance must be non-negative");
            }
        }
        if self.convergence_window == 0 {
            return bad("convergence_window must be at least 1");
        }
        Ok(())
    }

    pub fn noiseless(mut self) -> Self {
        self.noise = NoiseMode::Off;
        self.hessian_noise = None;
        self
    }
}

/// Diagnostics of the state after `iter` updates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub iter: usize,
    pub energy: f64,
    /// `max_j |∂E/∂θ_j|` over the active system generators, noiseless.
    pub grad_norm_system: f64,
    /// Smallest Hessian eigenvalue over the active ancilla generators, if any.
    pub min_hessian_eig: Option<f64>,
    pub neel: Option<f64>,
    pub state_fidelity_ground: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: DensityMatrix,
    pub records: Vec<TrajectoryRecord>,
    /// Stopped early because both optimality conditions held for a full window.
    pub converged: bool,
}

impl Trajectory {
    pub fn final_energy(&self) -> f64 {
        self.records.last().map(|r| r.energy).unwrap_or(f64::NAN)
    }
}

/// Extra per-record observables.
#[derive(Debug, Clone, Default)]
pub struct Observers {
    pub neel: bool,
    /// Pure ground state for fidelity tracking (ignored above 8 qubits).
    pub ground_state: Option<CVector>,
}

fn check_joint(h: &DenseOperator, rho: &DensityMatrix) -> Result<()> {
    if h.layout() != rho.layout() {
        return Err(SsgdError::LayoutMismatch(
            "Hamiltonian and state live on different layouts".into(),
        ));
    }
    Ok(())
}

/// `∂E/∂θ_j = -i Tr([P_j, ρ] H)` at `θ = 0` for every generator.
pub fn first_order(h: &DenseOperator, rho: &DensityMatrix, gens: &[PauliString]) -> Result<Vec<f64>> {
    check_joint(h, rho)?;
    // -i Tr([P, ρ] H) = -i Tr(P [ρ, H])
    let rh = linalg::matmul(rho.matrix(), h.matrix());
    let c = &rh - rh.adjoint();
    gens.iter()
        .map(|p| Ok((Complex64::new(0.0, -1.0) * p.trace_with(&c)?).re))
        .collect()
}

/// `(g_S)_j = -i Tr([P_j, H̃] ρ̃) + δ_j`, the descent direction over system
/// generators. Returns `(noisy, noiseless)`.
pub fn system_direction<R: Rng + ?Sized>(
    h: &DenseOperator,
    rho: &DensityMatrix,
    gens: &[PauliString],
    noise_variance: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mask = rho.layout().ancilla_mask();
    if let Some(p) = gens.iter().find(|p| p.support_mask() & mask != 0) {
        return Err(SsgdError::GeneratorOnAncilla(p.to_string()));
    }
    let clean: Vec<f64> = first_order(h, rho, gens)?.into_iter().map(|d| -d).collect();
    let sigma = noise_variance.sqrt();
    let noisy = clean
        .iter()
        .map(|g| {
            let z: f64 = rng.sample(StandardNormal);
            g + sigma * z
        })
        .collect();
    Ok((noisy, clean))
}

/// Hessian `K_jk = -½ Tr({ad_{P_k}, ad_{P_j}}(ρ) H)` of `E(θ)` at `θ = 0`
/// for an arbitrary list of Hermitian words, using the expanded form
/// `-½ Tr({P_j,P_k}(ρH + Hρ)) + Tr(P_k ρ P_j H) + Tr(P_j ρ P_k H)`.
pub fn hessian_matrix(h: &DenseOperator, rho: &DensityMatrix, gens: &[PauliString]) -> Result<DMatrix<f64>> {
    check_joint(h, rho)?;
    let m = gens.len();
    let dim = h.dim();
    let mut k = DMatrix::zeros(m, m);
    if m == 0 {
        return Ok(k);
    }
    let rh = linalg::matmul(rho.matrix(), h.matrix());
    let s = &rh + rh.adjoint();

    // Tr(P_k ρ P_j H) = Σ_ab (P_k ρ)[a, b] (P_j H)[b, a] only sees entries
    // where P_k ρ can be nonzero.
    let rho_data = rho.matrix().as_slice();
    let h_data = h.matrix().as_slice();
    let support: Vec<bool> = (0..dim)
        .map(|b| rho_data[b * dim..(b + 1) * dim].iter().any(|z| *z != ZERO))
        .collect();
    let cols: Vec<usize> = (0..dim).filter(|&b| support[b]).collect();
    let actions: Vec<(usize, Vec<Complex64>)> = gens.iter().map(|p| p.column_action()).collect();
    let rows: Vec<usize> = (0..dim)
        .filter(|&a| actions.iter().any(|(f, _)| support[a ^ f]))
        .collect();
    let entries = rows.len() * cols.len();

    // real GEMM: Re Σ y x = Σ (y.re x.re - y.im x.im)
    let mut ya = DMatrix::<f64>::zeros(m, 2 * entries);
    let mut xb = DMatrix::<f64>::zeros(2 * entries, m);
    for (idx, (flip, amps)) in actions.iter().enumerate() {
        let mut e = 0;
        for &a in &rows {
            let sa = a ^ flip;
            for &b in &cols {
                // (Pρ)[a, b] = amp(a^f) ρ[a^f, b];  (PH)[b, a] = amp(b^f) H[b^f, a]
                let y = amps[sa] * rho_data[sa + b * dim];
                let sb = b ^ flip;
                let x = amps[sb] * h_data[sb + a * dim];
                ya[(idx, e)] = y.re;
                ya[(idx, entries + e)] = -y.im;
                xb[(e, idx)] = x.re;
                xb[(entries + e, idx)] = x.im;
                e += 1;
            }
        }
    }
    let cross = ya * xb;
    for j in 0..m {
        for l in j..m {
            let mut value = cross[(l, j)] + cross[(j, l)];
            if let Some(word) = gens[j].anticommutator(&gens[l])? {
                value -= word.trace_with(&s)?.re;
            }
            k[(j, l)] = value;
            k[(l, j)] = value;
        }
    }
    Ok(k)
}

/// Hessian over ancilla-coupled generators; each must flip the ancilla out
/// of `|0>`.
pub fn hessian(h: &DenseOperator, rho: &DensityMatrix, gens: &[PauliString]) -> Result<DMatrix<f64>> {
    if let Some(p) = gens.iter().find(|p| !flips_ancilla(p, rho.layout())) {
        return Err(SsgdError::AncillaFilter(p.to_string()));
    }
    hessian_matrix(h, rho, gens)
}

/// `g_A = Q E'` where `K = Q diag(E) Qᵀ` and `E'_i = E_i` if `E_i < -e_tol`,
/// else 0. Also returns the smallest eigenvalue.
pub fn ancilla_direction(k: &DMatrix<f64>, e_tol: f64) -> Result<(Vec<f64>, f64)> {
    let m = k.nrows();
    if m == 0 {
        return Ok((Vec::new(), f64::INFINITY));
    }
    let scale = k.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let asym = (k - k.transpose()).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if asym > 1e-10 * scale {
        return Err(SsgdError::InvalidParameter(format!(
            "Hessian is not symmetric (max asymmetry {asym:.3e})"
        )));
    }
    let (values, vectors) = linalg::symmetric_eigh(k);
    let mut g = vec![0.0; m];
    for (i, &e) in values.iter().enumerate() {
        if e < -e_tol {
            for (r, gr) in g.iter_mut().enumerate() {
                *gr += vectors[(r, i)] * e;
            }
        }
    }
    Ok((g, values[0]))
}

/// One SSGD trajectory driver.
pub struct Optimizer<'a> {
    hamiltonian: &'a DenseOperator,
    gens: &'a GeneratorSet,
    config: SsgdConfig,
    schedule: Option<&'a BrickwallSchedule>,
    observers: Observers,
    unitary_only: bool,
}

impl<'a> Optimizer<'a> {
    pub fn new(hamiltonian: &'a DenseOperator, gens: &'a GeneratorSet, config: SsgdConfig) -> Self {
        Self {
            hamiltonian,
            gens,
            config,
            schedule: None,
            observers: Observers::default(),
            unitary_only: false,
        }
    }

    pub fn with_schedule(mut self, schedule: &'a BrickwallSchedule) -> Self {
        self.schedule = Some(schedule);
        self
    }

    pub fn with_observers(mut self, observers: Observers) -> Self {
        self.observers = observers;
        self
    }

    /// Drop every ancilla-coupled word, schedule included: purely unitary
    /// updates with the same system words and RNG draws.
    pub fn unitary_only(mut self) -> Self {
        self.unitary_only = true;
        self
    }

    /// Run with the RNG seeded from `config.seed`.
    pub fn run(&self, rho0: &DensityMatrix) -> Result<Trajectory> {
        let mut rng = random::rng(self.config.seed);
        self.run_with_rng(rho0, &mut rng)
    }

    pub fn run_with_rng(&self, rho0: &DensityMatrix, rng: &mut SimRng) -> Result<Trajectory> {
        self.config.validate()?;
        let h = self.hamiltonian;
        if h.layout().n_ancilla() != 0 || rho0.layout() != h.layout() {
            return Err(SsgdError::LayoutMismatch(
                "run expects a system-only state and Hamiltonian on the same register".into(),
            ));
        }
        let n_system = h.layout().n_system();
        let check_gens = |g: &GeneratorSet| -> Result<()> {
            if g.layout().n_system() != n_system {
                return Err(SsgdError::LayoutMismatch(format!(
                    "generators cover {} system qubits, Hamiltonian {}",
                    g.layout().n_system(),
                    n_system
                )));
            }
            Ok(())
        };
        check_gens(self.gens)?;
        let cfg = &self.config;
        let noise_var = cfg.noise.variance(cfg.step_system);

        let mut extended: Vec<Option<DenseOperator>> = Vec::new();
        let mut joint_h = |n_anc: usize| -> Result<DenseOperator> {
            if extended.len() <= n_anc {
                extended.resize(n_anc + 1, None);
            }
            if extended[n_anc].is_none() {
                extended[n_anc] = Some(h.extend_with_ancilla(n_anc)?);
            }
            Ok(extended[n_anc].clone().expect("just filled"))
        };

        let track_fidelity = self
            .observers
            .ground_state
            .as_ref()
            .filter(|_| n_system <= 8);

        let mut rho = rho0.clone();
        let mut records = Vec::with_capacity(cfg.max_iters + 1);
        let mut streak = 0usize;
        let mut converged = false;
        for t in 0..=cfg.max_iters {
            let active_owned;
            let active: &GeneratorSet = match (self.schedule, self.unitary_only) {
                (Some(s), drop) => {
                    let g = s.gens_at_phase(t);
                    active_owned = if drop { g.without_ancilla() } else { g };
                    check_gens(&active_owned)?;
                    &active_owned
                }
                (None, true) => {
                    active_owned = self.gens.without_ancilla();
                    &active_owned
                }
                (None, false) => self.gens,
            };
            let n_anc = if active.ancilla().is_empty() {
                0
            } else {
                active.layout().n_ancilla()
            };
            let layout = if n_anc == 0 {
                active.layout().system_only()
            } else {
                *active.layout()
            };
            let system_words = lower_to(active.system(), active.layout(), &layout)?;
            let hj = joint_h(n_anc)?;
            let rho_joint = attach_ancilla(&rho, n_anc)?;

            let (g_s, clean) = system_direction(&hj, &rho_joint, &system_words, noise_var, rng)?;
            let grad_norm = clean.iter().fold(0.0_f64, |acc, g| acc.max(g.abs()));

            let (g_a, min_eig) = if n_anc > 0 {
                let mut k = hessian(&hj, &rho_joint, active.ancilla())?;
                if let Some(var) = cfg.hessian_noise {
                    add_symmetric_noise(&mut k, var, rng);
                }
                let (g, e) = ancilla_direction(&k, cfg.e_tol)?;
                (g, Some(e))
            } else {
                (Vec::new(), None)
            };

            let energy = state::expectation(&rho, h)?;
            records.push(TrajectoryRecord {
                iter: t,
                energy,
                grad_norm_system: grad_norm,
                min_hessian_eig: min_eig,
                neel: if self.observers.neel {
                    Some(neel_order(&rho)?)
                } else {
                    None
                },
                state_fidelity_ground: track_fidelity.map(|psi| rho.fidelity_with_pure(psi)),
            });

            let stationary = grad_norm < cfg.convergence_grad_tol
                && min_eig.map_or(true, |e| e >= -cfg.e_tol);
            streak = if stationary { streak + 1 } else { 0 };
            if streak >= cfg.convergence_window {
                converged = true;
                break;
            }
            if t == cfg.max_iters {
                break;
            }

            let mut terms: Vec<(f64, PauliString)> = Vec::with_capacity(g_a.len() + g_s.len());
            terms.extend(g_a.iter().zip(active.ancilla()).map(|(g, p)| (g * cfg.step_ancilla, *p)));
            terms.extend(g_s.iter().zip(&system_words).map(|(g, p)| (g * cfg.step_system, *p)));
            let stepped = state::apply_generator_step(&rho_joint, &terms)?;
            rho = if n_anc > 0 {
                reset_ancilla(&stepped)?
            } else {
                stepped
            };
            rho = rho.sanitized();
        }
        Ok(Trajectory {
            final_state: rho,
            records,
            converged,
        })
    }
}

/// Re-index system words from `from` onto `to` (same system block, possibly
/// fewer ancilla qubits).
fn lower_to(words: &[PauliString], from: &RegisterLayout, to: &RegisterLayout) -> Result<Vec<PauliString>> {
    if from == to {
        return Ok(words.to_vec());
    }
    let shift = from.n_ancilla() - to.n_ancilla();
    words
        .iter()
        .map(|p| {
            let axes: Vec<_> = p.support().into_iter().map(|q| (q - shift, p.axis(q))).collect();
            PauliString::from_axes(to.total(), &axes).map(|w| w.with_phase(p.phase()))
        })
        .collect()
}

fn add_symmetric_noise<R: Rng + ?Sized>(k: &mut DMatrix<f64>, variance: f64, rng: &mut R) {
    let sigma = variance.sqrt();
    let m = k.nrows();
    for j in 0..m {
        for l in j..m {
            let z: f64 = rng.sample(StandardNormal);
            k[(j, l)] += sigma * z;
            if l != j {
                k[(l, j)] = k[(j, l)];
            }
        }
    }
}

/// Outcome of [`sign_convention_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct SignVerdict {
    pub trials: usize,
    pub descending: usize,
    /// Largest energy change seen among trials with a non-negligible gradient.
    pub worst_delta: f64,
}

impl SignVerdict {
    pub fn passed(&self) -> bool {
        self.descending == self.trials
    }
}

/// Confirms on random two-qubit instances that one noiseless system step
/// `θ_S = g_S δt_S` lowers the energy whenever the gradient is non-zero.
pub fn sign_convention_check(seed: u64, trials: usize) -> Result<SignVerdict> {
    let step = 1e-4;
    let layout = RegisterLayout::new(2, 1)?;
    let gens = build_standard(2, layout, Boundary::Open)?;
    let mut verdict = SignVerdict {
        trials,
        descending: 0,
        worst_delta: f64::NEG_INFINITY,
    };
    for trial in 0..trials {
        let mut rng = random::stream(seed, trial as u64);
        let h = random::random_hermitian(2, &mut rng);
        let rho = random::random_density(2, &mut rng);
        let hj = h.extend_with_ancilla(1)?;
        let rj = attach_ancilla(&rho, 1)?;
        let (g, _) = system_direction(&hj, &rj, gens.system(), 0.0, &mut rng)?;
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let terms: Vec<(f64, PauliString)> = g.iter().zip(gens.system()).map(|(v, p)| (v * step, *p)).collect();
        let after = reset_ancilla(&state::apply_generator_step(&rj, &terms)?)?;
        let delta = state::expectation(&after, &h)? - state::expectation(&rho, &h)?;
        if norm <= 1e-6 || delta < 0.0 {
            verdict.descending += 1;
        }
        if norm > 1e-6 {
            verdict.worst_delta = verdict.worst_delta.max(delta);
        }
    }
    Ok(verdict)
}
