//! Brute-force reference computations that share no code path with the
//! optimizer: Kronecker-built Pauli matrices, a Taylor-series matrix
//! exponential, and finite differences of the full energy map.

use num_complex::Complex64;

use crate::linalg::{self, CMatrix};
use crate::pauli::{Axis, PauliString};

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == linalg::ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Dense matrix of a word built as an explicit Kronecker product.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, p.phase().to_complex());
    for q in 0..p.n_qubits() {
        let single = match p.axis(q) {
            Axis::I => linalg::identity(2),
            Axis::X => linalg::pauli_x(),
            Axis::Y => linalg::pauli_y(),
            Axis::Z => linalg::pauli_z(),
        };
        m = kron(&m, &single);
    }
    m
}

/// `exp(A)` by scaling and squaring around a truncated Taylor series.
pub fn expm_taylor(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm: f64 = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.125 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = a * Complex64::new(scale, 0.0);
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `E(θ) = Tr(U ρ U† H)` with `U = exp(-i Σ θ_j P_j)`.
pub fn energy_at(h: &CMatrix, rho: &CMatrix, gens: &[CMatrix], theta: &[f64]) -> f64 {
    let n = h.nrows();
    let mut generator = CMatrix::zeros(n, n);
    for (t, p) in theta.iter().zip(gens) {
        generator += p * Complex64::new(*t, 0.0);
    }
    let u = expm_taylor(&(generator * Complex64::new(0.0, -1.0)));
    let evolved = &u * rho * u.adjoint();
    linalg::trace_product(&evolved, h).re
}

/// Central differences `∂E/∂θ_j` at `θ = 0`.
pub fn fd_gradient(h: &CMatrix, rho: &CMatrix, words: &[PauliString], step: f64) -> Vec<f64> {
    let gens: Vec<CMatrix> = words.iter().map(pauli_matrix).collect();
    let m = gens.len();
    (0..m)
        .map(|j| {
            let mut plus = vec![0.0; m];
            let mut minus = vec![0.0; m];
            plus[j] = step;
            minus[j] = -step;
            (energy_at(h, rho, &gens, &plus) - energy_at(h, rho, &gens, &minus)) / (2.0 * step)
        })
        .collect()
}

/// Full finite-difference Hessian of `E(θ)` at `θ = 0`.
pub fn fd_hessian(h: &CMatrix, rho: &CMatrix, words: &[PauliString], step: f64) -> Vec<Vec<f64>> {
    let gens: Vec<CMatrix> = words.iter().map(pauli_matrix).collect();
    let m = gens.len();
    let e = |pairs: &[(usize, f64)]| {
        let mut theta = vec![0.0; m];
        for &(i, v) in pairs {
            theta[i] += v;
        }
        energy_at(h, rho, &gens, &theta)
    };
    let e0 = e(&[]);
    let mut out = vec![vec![0.0; m]; m];
    for j in 0..m {
        out[j][j] = (e(&[(j, step)]) - 2.0 * e0 + e(&[(j, -step)])) / (step * step);
        for k in (j + 1)..m {
            let v = (e(&[(j, step), (k, step)]) - e(&[(j, step), (k, -step)])
                - e(&[(j, -step), (k, step)])
                + e(&[(j, -step), (k, -step)]))
                / (4.0 * step * step);
            out[j][k] = v;
            out[k][j] = v;
        }
    }
    out
}

/// Column-stacking superoperator of `X ↦ L X L† - ½{L†L, X}`.
pub fn lindblad_superoperator(l: &CMatrix) -> CMatrix {
    let n = l.nrows();
    let id = CMatrix::identity(n, n);
    let ldl = l.adjoint() * l;
    // vec(A X B) = (Bᵀ ⊗ A) vec(X)
    kron(&l.conjugate(), l)
        - kron(&id, &ldl) * Complex64::new(0.5, 0.0)
        - kron(&ldl.transpose(), &id) * Complex64::new(0.5, 0.0)
}

/// Central difference of `Tr[H e^{t𝓛}(ρ)]` at `t = 0`, with the channel
/// applied through the exponential of the vectorized superoperator.
pub fn fd_lindblad_derivative(h: &CMatrix, rho: &CMatrix, l: &CMatrix, step: f64) -> f64 {
    let n = rho.nrows();
    let sup = lindblad_superoperator(l);
    let vec_rho = CMatrix::from_fn(n * n, 1, |idx, _| rho[(idx % n, idx / n)]);
    let value = |t: f64| {
        let evolved = expm_taylor(&(&sup * Complex64::new(t, 0.0))) * &vec_rho;
        let out = CMatrix::from_fn(n, n, |i, j| evolved[(j * n + i, 0)]);
        linalg::trace_product(h, &out).re
    };
    (value(step) - value(-step)) / (2.0 * step)
}
