//! Monte Carlo gradient and energy-variance estimates on random states and
//! random brickwall circuits.

use rand::Rng;

use crate::error::{Result, SsgdError};
use crate::generators::{BrickPhase, BrickwallSchedule};
use crate::linalg::{self, CMatrix};
use crate::pauli::PauliString;
use crate::random::{haar_ket, haar_unitary};
use crate::state::DenseOperator;

/// Brickwall bound exponent `k (f + 1)` with `k = 2`, `f = 5`.
pub const BRICKWALL_BOUND_EXPONENT: i32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSurvey {
    /// `max_P |dE/dθ_P|` for each sampled state, in draw order.
    pub max_gradients: Vec<f64>,
    pub median: f64,
    pub mean: f64,
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Largest first-order gradient over `words` on Haar-random pure states.
pub fn haar_gradient_survey<R: Rng + ?Sized>(
    h: &DenseOperator,
    words: &[PauliString],
    samples: usize,
    rng: &mut R,
) -> Result<GradientSurvey> {
    let n = h.layout().total();
    if let Some(p) = words.iter().find(|p| p.n_qubits() != n) {
        return Err(SsgdError::LayoutMismatch(format!("{p} is not a word on {n} qubits")));
    }
    let dim = h.dim();
    let mut max_gradients = Vec::with_capacity(samples);
    for _ in 0..samples {
        let psi = haar_ket(dim, rng);
        let h_psi = h.matrix() * &psi;
        let mut best: f64 = 0.0;
        for p in words {
            // dE/dθ = -i <ψ|[P, H]|ψ> = 2 Im <Pψ|Hψ>
            let p_psi = p.apply_vector(&psi)?;
            let g = 2.0 * p_psi.dotc(&h_psi).im;
            best = best.max(g.abs());
        }
        max_gradients.push(best);
    }
    let mean = if samples == 0 {
        0.0
    } else {
        max_gradients.iter().sum::<f64>() / samples as f64
    };
    Ok(GradientSurvey {
        median: median(&max_gradients),
        mean,
        max_gradients,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEstimate {
    pub mean: f64,
    /// Unbiased sample variance of `Tr(H ρ(θ))`.
    pub variance: f64,
    /// Standard error of `variance`.
    pub std_error: f64,
    /// `‖H‖²_HS / 5^12` with `‖H‖²_HS = Tr(H²) / 2^n`.
    pub bound: f64,
    pub energies: Vec<f64>,
}

impl VarianceEstimate {
    /// The estimate minus `sigmas` standard errors still clears the bound.
    pub fn above_bound(&self, sigmas: f64) -> bool {
        self.variance - sigmas * self.std_error >= self.bound
    }
}

pub fn brickwall_bound(h: &DenseOperator) -> f64 {
    let hs = linalg::trace_product(h.matrix(), h.matrix()).re / h.dim() as f64;
    hs / 5f64.powi(BRICKWALL_BOUND_EXPONENT)
}

/// `M <- G M` for a gate `G` on `qubits` (first listed is most significant).
fn apply_local(m: &mut CMatrix, gate: &CMatrix, qubits: &[usize], n: usize) {
    let k = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    let mask: usize = bits.iter().map(|b| 1usize << b).sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|a| {
            (0..k)
                .filter(|&i| a >> (k - 1 - i) & 1 == 1)
                .map(|i| 1usize << bits[i])
                .sum()
        })
        .collect();
    let mut buf = vec![linalg::ZERO; 1 << k];
    for col in 0..m.ncols() {
        for base in (0..m.nrows()).filter(|r| r & mask == 0) {
            for (a, off) in offsets.iter().enumerate() {
                buf[a] = m[(base | off, col)];
            }
            for (a, off) in offsets.iter().enumerate() {
                let mut acc = linalg::ZERO;
                for (b, v) in buf.iter().enumerate() {
                    acc += gate[(a, b)] * v;
                }
                m[(base | off, col)] = acc;
            }
        }
    }
}

/// `ρ <- G ρ G†` for Hermitian `ρ`.
fn conjugate(rho: &mut CMatrix, gate: &CMatrix, qubits: &[usize], n: usize) {
    apply_local(rho, gate, qubits, n);
    rho.adjoint_mut();
    apply_local(rho, gate, qubits, n);
}

/// Haar unitary on (ancilla, system qubit) followed by an ancilla reset, as
/// the Kraus channel `K_m[s', s] = U[2m + s', s]` on the system qubit.
fn ancilla_reset_channel(rho: &CMatrix, u: &CMatrix, qubit: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for m in 0..2 {
        let kraus = CMatrix::from_fn(2, 2, |sp, s| u[(2 * m + sp, s)]);
        let mut part = rho.clone();
        conjugate(&mut part, &kraus, &[qubit], n);
        out += part;
    }
    out
}

/// Energy statistics of random brickwall circuits of `layers` phases acting
/// on `|0…0>`, with every two-qubit block drawn from the Haar measure.
pub fn brickwall_variance<R: Rng + ?Sized>(
    h: &DenseOperator,
    schedule: &BrickwallSchedule,
    layers: usize,
    samples: usize,
    rng: &mut R,
) -> Result<VarianceEstimate> {
    let n = schedule.n_system();
    if h.layout().total() != n || h.layout().n_ancilla() != 0 {
        return Err(SsgdError::LayoutMismatch(format!(
            "Hamiltonian must act on the {n} system qubits only"
        )));
    }
    if layers == 0 || samples < 2 {
        return Err(SsgdError::InvalidParameter(
            "need at least one layer and two samples".into(),
        ));
    }
    let dim = h.dim();
    let mut energies = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(0, 0)] = linalg::ONE;
        for t in 0..layers {
            match schedule.phase(t) {
                BrickPhase::AncillaLayer => {
                    for q in 0..n {
                        let u = haar_unitary(4, rng);
                        rho = ancilla_reset_channel(&rho, &u, q, n);
                    }
                }
                phase => {
                    for (a, b) in schedule.bonds(phase) {
                        let u = haar_unitary(4, rng);
                        conjugate(&mut rho, &u, &[a, b], n);
                    }
                }
            }
        }
        energies.push(linalg::trace_product(&rho, h.matrix()).re);
    }

    let count = samples as f64;
    let mean = energies.iter().sum::<f64>() / count;
    let m2 = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / count;
    let m4 = energies.iter().map(|e| (e - mean).powi(4)).sum::<f64>() / count;
    let variance = m2 * count / (count - 1.0);
    let var_of_var = ((m4 - m2 * m2 * (count - 3.0) / (count - 1.0)) / count).max(0.0);
    Ok(VarianceEstimate {
        mean,
        variance,
        std_error: var_of_var.sqrt(),
        bound: brickwall_bound(h),
        energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::generators::build_brickwall;
    use crate::models::{build_tfim, Boundary, TfimParams};
    use crate::pauli::{Axis, RegisterLayout};
    use crate::random::rng;
    use crate::verification::oracle;

    fn zero_op(n: usize) -> DenseOperator {
        let layout = RegisterLayout::system(n).unwrap();
        DenseOperator::hermitian(CMatrix::zeros(1 << n, 1 << n), layout).unwrap()
    }

    #[test]
    fn zero_hamiltonian_has_zero_gradient() {
        let h = zero_op(3);
        let words = vec![PauliString::single(3, 1, Axis::X).unwrap()];
        let s = haar_gradient_survey(&h, &words, 10, &mut rng(1)).unwrap();
        assert!(s.max_gradients.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn survey_matches_dense_commutator() {
        let h = build_tfim(&TfimParams::new(3, 1.0, 0.4, 0.2)).unwrap();
        let p = PauliString::from_axes(3, &[(0, Axis::Y), (1, Axis::Z)]).unwrap();
        let mut r1 = rng(9);
        let s = haar_gradient_survey(&h, std::slice::from_ref(&p), 3, &mut r1).unwrap();
        let mut r2 = rng(9);
        let pm = oracle::pauli_matrix(&p);
        for g in s.max_gradients {
            let psi = haar_ket(8, &mut r2);
            let c = linalg::commutator(&pm, h.matrix());
            let v = (psi.adjoint() * c * &psi)[(0, 0)] * Complex64::new(0.0, -1.0);
            assert!((g - v.re.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_hamiltonian_has_zero_variance() {
        let sched = build_brickwall(2, Boundary::Open).unwrap();
        let v = brickwall_variance(&zero_op(2), &sched, 4, 20, &mut rng(2)).unwrap();
        assert_eq!(v.variance, 0.0);
        assert_eq!(v.bound, 0.0);
    }

    #[test]
    fn single_z_above_bound() {
        let layout = RegisterLayout::system(2).unwrap();
        let z0 = DenseOperator::from_pauli_sum(&[(1.0, PauliString::single(2, 0, Axis::Z).unwrap())], layout).unwrap();
        let sched = build_brickwall(2, Boundary::Open).unwrap();
        let v = brickwall_variance(&z0, &sched, 1, 500, &mut rng(3)).unwrap();
        assert!((v.bound - 1.0 / 5f64.powi(12)).abs() < 1e-20);
        assert!(v.above_bound(3.0), "{} vs {}", v.variance, v.bound);
    }

    #[test]
    fn circuit_keeps_state_valid() {
        let h = build_tfim(&TfimParams::new(4, 1.0, 0.3, 0.1)).unwrap();
        let sched = build_brickwall(4, Boundary::Periodic).unwrap();
        let v = brickwall_variance(&h, &sched, 6, 5, &mut rng(4)).unwrap();
        let (lo, hi) = {
            let (e, _) = linalg::hermitian_eigh(h.matrix());
            (e[0], e[e.len() - 1])
        };
        assert!(v.energies.iter().all(|e| *e >= lo - 1e-9 && *e <= hi + 1e-9));
    }

    #[test]
    fn apply_local_matches_kron() {
        let mut r = rng(5);
        let u = haar_unitary(4, &mut r);
        let id = linalg::identity(2);
        // qubits (0, 1) of 3 → U ⊗ I
        let mut m = linalg::identity(8);
        apply_local(&mut m, &u, &[0, 1], 3);
        assert!(linalg::max_abs(&(m - oracle::kron(&u, &id))) < 1e-14);
        // qubits (2, 1): swap-conjugated placement, compare by action on basis
        let mut m = linalg::identity(8);
        apply_local(&mut m, &u, &[2, 1], 3);
        for a in 0..4 {
            for b in 0..4 {
                // row index bits: q0 q1 q2 ; gate index a = (q2, q1)
                let row = ((a & 1) << 1) | (a >> 1);
                let col = ((b & 1) << 1) | (b >> 1);
                assert!((m[(row, col)] - u[(a, b)]).norm() < 1e-14);
            }
        }
    }
}
