//! Lindbladian perturbations and the check that a positive semidefinite
//! ancilla Hessian rules out any first-order energy decrease from them.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Result, SsgdError};
use crate::linalg::{self, CMatrix};
use crate::pauli::PauliString;
use crate::ssgd::hessian;
use crate::state::{attach_ancilla, DenseOperator, DensityMatrix};

/// A jump operator `L` on the contiguous system window
/// `start .. start + width`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladOp {
    jump: CMatrix,
    start: usize,
    width: usize,
}

impl LindbladOp {
    pub fn new(jump: CMatrix, start: usize) -> Result<Self> {
        let dim = jump.nrows();
        if dim != jump.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(SsgdError::InvalidParameter(
                "jump operator must be a square matrix on whole qubits".into(),
            ));
        }
        if jump.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SsgdError::InvalidParameter("jump operator has non-finite entries".into()));
        }
        Ok(Self {
            jump,
            start,
            width: dim.trailing_zeros() as usize,
        })
    }

    pub fn jump(&self) -> &CMatrix {
        &self.jump
    }

    pub fn window(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.width
    }

    /// `I ⊗ L ⊗ I` on `n` system qubits.
    pub fn embedded(&self, n: usize) -> Result<CMatrix> {
        embed(&self.jump, self.start, self.width, n)
    }

    /// Hermitian parts `A = (L + L†)/2`, `B = (L - L†)/2i` with `L = A + iB`.
    pub fn hermitian_split(&self) -> (CMatrix, CMatrix) {
        let l = &self.jump;
        let ld = l.adjoint();
        let a = (l + &ld) * Complex64::new(0.5, 0.0);
        let b = (l - &ld) * Complex64::new(0.0, -0.5);
        (a, b)
    }
}

fn embed(op: &CMatrix, start: usize, width: usize, n: usize) -> Result<CMatrix> {
    if start + width > n {
        return Err(SsgdError::InvalidParameter(format!(
            "window {start}..{} outside {n} system qubits",
            start + width
        )));
    }
    let left = linalg::identity(1 << start);
    let right = linalg::identity(1 << (n - start - width));
    Ok(left.kronecker(op).kronecker(&right))
}

fn system_only(rho: &DensityMatrix, h: &DenseOperator) -> Result<usize> {
    if rho.layout().n_ancilla() != 0 || rho.layout() != h.layout() {
        return Err(SsgdError::LayoutMismatch(
            "expected system-only state and Hamiltonian on the same register".into(),
        ));
    }
    Ok(rho.layout().n_system())
}

/// `𝓛(ρ) = L ρ L† - ½{L†L, ρ}` on the full system register.
pub fn apply_lindbladian(rho: &CMatrix, l: &CMatrix) -> CMatrix {
    let ldl = l.adjoint() * l;
    l * rho * l.adjoint() - (&ldl * rho + rho * &ldl) * Complex64::new(0.5, 0.0)
}

/// `d/dt Tr[H e^{t𝓛}(ρ)]` at `t = 0`, i.e. `Tr(𝓛(ρ) H)`.
pub fn lindblad_derivative(h: &DenseOperator, rho: &DensityMatrix, lb: &LindbladOp) -> Result<f64> {
    let n = system_only(rho, h)?;
    let l = lb.embedded(n)?;
    let value = linalg::trace_product(&apply_lindbladian(rho.matrix(), &l), h.matrix());
    Ok(value.re)
}

/// `G = X ⊗ A + Y ⊗ B = [[0, L†], [L, 0]]` on (one ancilla) ⊗ system.
pub fn dilation(lb: &LindbladOp, n_system: usize) -> Result<CMatrix> {
    let (a, b) = lb.hermitian_split();
    let a = embed(&a, lb.start, lb.width, n_system)?;
    let b = embed(&b, lb.start, lb.width, n_system)?;
    Ok(linalg::pauli_x().kronecker(&a) + linalg::pauli_y().kronecker(&b))
}

/// Max entry-wise deviation of `ad_G(|0><0| ⊗ ρ)` from `[[0, -ρL†], [Lρ, 0]]`.
pub fn ad_g_block_error(rho: &DensityMatrix, lb: &LindbladOp) -> Result<f64> {
    let n = rho.layout().n_system();
    if rho.layout().n_ancilla() != 0 {
        return Err(SsgdError::LayoutMismatch("expected a system-only state".into()));
    }
    let g = dilation(lb, n)?;
    let joint = attach_ancilla(rho, 1)?;
    let ad = linalg::commutator(&g, joint.matrix());
    let l = lb.embedded(n)?;
    let d = rho.matrix().nrows();
    let mut expected = CMatrix::zeros(2 * d, 2 * d);
    expected
        .view_mut((0, d), (d, d))
        .copy_from(&(-(rho.matrix() * l.adjoint())));
    expected.view_mut((d, 0), (d, d)).copy_from(&(&l * rho.matrix()));
    Ok(linalg::max_abs(&(ad - expected)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Report {
    /// `Tr(𝓛(ρ) H)`.
    pub lindblad_derivative: f64,
    /// `½ αᵀ K α`.
    pub quadratic_form: f64,
    pub abs_error: f64,
    pub alpha: Vec<f64>,
    pub min_hessian_eig: f64,
    pub e_tol: f64,
    /// `K ⪰ -e_tol` implies `Tr(𝓛(ρ)H) ≥ -½ e_tol |α|²`.
    pub implied_floor: f64,
    pub corollary_holds: bool,
}

impl Lemma2Report {
    pub fn identity_holds(&self, tol: f64) -> bool {
        self.abs_error <= tol
    }
}

/// Expands the dilation `G` over `gens` (Pauli words on one ancilla plus the
/// system), builds the ancilla Hessian on `|0><0| ⊗ ρ` and compares
/// `Tr(𝓛(ρ)H)` with `½ αᵀ K α`.
pub fn check_lemma2(
    h: &DenseOperator,
    rho: &DensityMatrix,
    lb: &LindbladOp,
    gens: &[PauliString],
    e_tol: f64,
) -> Result<Lemma2Report> {
    let n = system_only(rho, h)?;
    let g = dilation(lb, n)?;
    let total = n + 1;
    let dim = 1usize << total;
    if let Some(p) = gens.iter().find(|p| p.n_qubits() != total) {
        return Err(SsgdError::LayoutMismatch(format!(
            "generator {p} is not on a one-ancilla register of {total} qubits"
        )));
    }

    // Pauli words are orthogonal under the trace inner product.
    let alpha: Vec<f64> = gens
        .iter()
        .map(|p| Ok(p.trace_with(&g)?.re / dim as f64))
        .collect::<Result<_>>()?;
    let mut rebuilt = CMatrix::zeros(dim, dim);
    for (a, p) in alpha.iter().zip(gens) {
        p.accumulate_into(*a, &mut rebuilt)?;
    }
    let residual = linalg::max_abs(&(&rebuilt - &g));
    if residual > 1e-10 * (1.0 + linalg::max_abs(&g)) {
        return Err(SsgdError::MissingGenerators(format!(
            "generator set does not span X⊗P and Y⊗P on window {:?} (residual {residual:.3e})",
            lb.window()
        )));
    }

    let h_joint = h.extend_with_ancilla(1)?;
    let rho_joint = attach_ancilla(rho, 1)?;
    let k = hessian(&h_joint, &rho_joint, gens)?;
    let av = DVector::from_vec(alpha.clone());
    let quadratic_form = 0.5 * (av.transpose() * &k * &av)[(0, 0)];
    let lhs = lindblad_derivative(h, rho, lb)?;
    let (eigs, _) = linalg::symmetric_eigh(&k);
    let min_eig = eigs.first().copied().unwrap_or(0.0);
    let alpha_sq: f64 = alpha.iter().map(|a| a * a).sum();
    let implied_floor = -0.5 * e_tol * alpha_sq;
    let premise = min_eig >= -e_tol;
    let corollary_holds = !premise || lhs >= implied_floor - 1e-9 * (1.0 + lhs.abs());
    Ok(Lemma2Report {
        lindblad_derivative: lhs,
        quadratic_form,
        abs_error: (lhs - quadratic_form).abs(),
        alpha,
        min_hessian_eig: min_eig,
        e_tol,
        implied_floor,
        corollary_holds,
    })
}
