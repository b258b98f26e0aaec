//! Dense density matrices on the joint ancilla ⊗ system register.

use num_complex::Complex64;

use crate::error::{Result, SsgdError};
use crate::linalg::{self, CMatrix, CVector, ZERO};
use crate::pauli::{PauliString, RegisterLayout};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
/// Observables may carry this much anti-Hermitian residue before being rejected.
pub const OBSERVABLE_TOL: f64 = 1e-10;

/// Largest register simulated densely.
pub const MAX_DENSE_QUBITS: usize = 12;

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    layout: RegisterLayout,
}

/// A square operator sized for a layout, typically a Hamiltonian or observable.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
    layout: RegisterLayout,
}

fn check_dims(matrix: &CMatrix, layout: &RegisterLayout) -> Result<()> {
    if layout.total() > MAX_DENSE_QUBITS {
        return Err(SsgdError::TooLarge(layout.total()));
    }
    let dim = layout.dim();
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(SsgdError::LayoutMismatch(format!(
            "{}x{} matrix for a {}-qubit layout",
            matrix.nrows(),
            matrix.ncols(),
            layout.total()
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates all three state invariants.
    pub fn new(matrix: CMatrix, layout: RegisterLayout) -> Result<Self> {
        check_dims(&matrix, &layout)?;
        let herm = linalg::hermiticity_error(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(SsgdError::InvalidState(format!(
                "not Hermitian (max deviation {herm:.3e})"
            )));
        }
        let tr = linalg::trace(&matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(SsgdError::InvalidState(format!("trace {tr} != 1")));
        }
        let min_eig = linalg::hermitian_eigh(&matrix).0[0];
        if min_eig < -PSD_TOL {
            return Err(SsgdError::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { matrix, layout })
    }

    /// Skips validation; callers guarantee the invariants (unitary
    /// conjugation and partial trace of a valid state).
    pub(crate) fn from_parts_unchecked(matrix: CMatrix, layout: RegisterLayout) -> Self {
        Self { matrix, layout }
    }

    /// `|ψ><ψ|` for a normalized ket.
    pub fn pure(psi: &CVector, layout: RegisterLayout) -> Result<Self> {
        if psi.len() != layout.dim() {
            return Err(SsgdError::LayoutMismatch(format!(
                "ket of length {} for dimension {}",
                psi.len(),
                layout.dim()
            )));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SsgdError::InvalidState(format!("ket norm {norm}")));
        }
        Ok(Self {
            matrix: psi * psi.adjoint(),
            layout,
        })
    }

    /// Computational basis state `|index><index|`.
    pub fn basis_state(layout: RegisterLayout, index: usize) -> Result<Self> {
        let dim = layout.dim();
        if index >= dim {
            return Err(SsgdError::InvalidParameter(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut matrix = CMatrix::zeros(dim, dim);
        matrix[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(Self { matrix, layout })
    }

    /// Basis state from a bitstring such as `"000111"`; character `q` is
    /// qubit `q` of the system register.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let index = bitstring_index(bits)?;
        Self::basis_state(RegisterLayout::system(bits.len())?, index)
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let dim = layout.dim();
        let matrix = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self { matrix, layout }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_with_pure(&self, psi: &CVector) -> f64 {
        (psi.adjoint() * &self.matrix * psi)[(0, 0)].re
    }

    /// Population of each computational basis state.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Re-Hermitize, and if the spectrum dipped below `-PSD_TOL` floor it at
    /// zero and renormalize the trace.
    pub fn sanitized(self) -> Self {
        let layout = self.layout;
        let mut m = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let (vals, vecs) = linalg::hermitian_eigh(&m);
        if vals[0] < -PSD_TOL {
            let floored: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
            let total: f64 = floored.iter().sum();
            let mut scaled = vecs.clone();
            for (j, v) in floored.iter().enumerate() {
                let w = Complex64::new(v / total, 0.0);
                for z in scaled.column_mut(j).iter_mut() {
                    *z *= w;
                }
            }
            m = linalg::matmul(&scaled, &vecs.adjoint());
        } else {
            let tr = linalg::trace(&m).re;
            m *= Complex64::new(1.0 / tr, 0.0);
        }
        Self { matrix: m, layout }
    }
}

/// Index of a bitstring, qubit 0 being the most significant bit.
pub fn bitstring_index(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > MAX_DENSE_QUBITS {
        return Err(SsgdError::InvalidParameter(format!(
            "bitstring {bits:?} has unsupported length"
        )));
    }
    let mut index = 0usize;
    for ch in bits.chars() {
        index <<= 1;
        match ch {
            '0' => {}
            '1' => index |= 1,
            _ => {
                return Err(SsgdError::InvalidParameter(format!(
                    "bitstring {bits:?} contains {ch:?}"
                )))
            }
        }
    }
    Ok(index)
}

/// Inverse of [`bitstring_index`].
pub fn index_bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if (index >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl DenseOperator {
    pub fn new(matrix: CMatrix, layout: RegisterLayout) -> Result<Self> {
        check_dims(&matrix, &layout)?;
        Ok(Self { matrix, layout })
    }

    /// Like [`DenseOperator::new`] but rejects non-Hermitian input.
    pub fn hermitian(matrix: CMatrix, layout: RegisterLayout) -> Result<Self> {
        check_dims(&matrix, &layout)?;
        let err = linalg::hermiticity_error(&matrix);
        if err > OBSERVABLE_TOL {
            return Err(SsgdError::NonHermitian(err));
        }
        Ok(Self { matrix, layout })
    }

    /// `Σ c_j P_j` on `layout`.
    pub fn from_pauli_sum(terms: &[(f64, PauliString)], layout: RegisterLayout) -> Result<Self> {
        let mut matrix = CMatrix::zeros(layout.dim(), layout.dim());
        for (c, p) in terms {
            if p.n_qubits() != layout.total() {
                return Err(SsgdError::LayoutMismatch(format!(
                    "term {p} on {} qubits, layout has {}",
                    p.n_qubits(),
                    layout.total()
                )));
            }
            p.accumulate_into(*c, &mut matrix)?;
        }
        Self::new(matrix, layout)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `I_A ⊗ H` on the joint layout with `n_ancilla` extra qubits.
    pub fn extend_with_ancilla(&self, n_ancilla: usize) -> Result<Self> {
        if self.layout.n_ancilla() != 0 {
            return Err(SsgdError::LayoutMismatch(
                "operator already carries an ancilla register".into(),
            ));
        }
        let joint = self.layout.with_ancilla(n_ancilla)?;
        let ds = self.dim();
        let blocks = 1usize << n_ancilla;
        let mut matrix = CMatrix::zeros(ds * blocks, ds * blocks);
        for b in 0..blocks {
            matrix
                .view_mut((b * ds, b * ds), (ds, ds))
                .copy_from(&self.matrix);
        }
        Self::new(matrix, joint)
    }
}

/// `|0><0|^{⊗n} ⊗ ρ`.
pub fn attach_ancilla(rho: &DensityMatrix, n_ancilla: usize) -> Result<DensityMatrix> {
    if rho.layout.n_ancilla() != 0 {
        return Err(SsgdError::LayoutMismatch(
            "attach_ancilla expects a system-only state".into(),
        ));
    }
    if n_ancilla == 0 {
        return Ok(rho.clone());
    }
    let joint = rho.layout.with_ancilla(n_ancilla)?;
    if joint.total() > MAX_DENSE_QUBITS {
        return Err(SsgdError::TooLarge(joint.total()));
    }
    let ds = rho.matrix.nrows();
    let dim = joint.dim();
    let mut matrix = CMatrix::zeros(dim, dim);
    matrix.view_mut((0, 0), (ds, ds)).copy_from(&rho.matrix);
    Ok(DensityMatrix::from_parts_unchecked(matrix, joint))
}

/// `Tr_A ρ̃`, removing the whole ancilla register at once.
pub fn reset_ancilla(rho_joint: &DensityMatrix) -> Result<DensityMatrix> {
    let layout = rho_joint.layout;
    if layout.n_ancilla() == 0 {
        return Err(SsgdError::NoAncilla);
    }
    let system = layout.system_only();
    let ds = system.dim();
    let blocks = 1usize << layout.n_ancilla();
    let mut out = CMatrix::zeros(ds, ds);
    for b in 0..blocks {
        out += rho_joint.matrix.view((b * ds, b * ds), (ds, ds));
    }
    Ok(DensityMatrix::from_parts_unchecked(out, system))
}

/// Dense Hermitian `Σ θ_j P_j` for the generator terms of one update.
pub fn generator_matrix(terms: &[(f64, PauliString)], layout: &RegisterLayout) -> Result<CMatrix> {
    let dim = layout.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for (theta, p) in terms {
        if !theta.is_finite() {
            return Err(SsgdError::InvalidParameter(format!(
                "non-finite coefficient {theta} on {p}"
            )));
        }
        if p.n_qubits() != layout.total() {
            return Err(SsgdError::LayoutMismatch(format!(
                "generator {p} on {} qubits, state has {}",
                p.n_qubits(),
                layout.total()
            )));
        }
        if !p.is_hermitian() {
            return Err(SsgdError::InvalidParameter(format!(
                "generator {p} is not Hermitian"
            )));
        }
        if *theta != 0.0 {
            p.accumulate_into(*theta, &mut m)?;
        }
    }
    Ok(m)
}

/// `U ρ U†` with `U = exp(-i Σ θ_j P_j)`.
pub fn apply_generator_step(
    rho: &DensityMatrix,
    terms: &[(f64, PauliString)],
) -> Result<DensityMatrix> {
    let generator = generator_matrix(terms, &rho.layout)?;
    if generator.iter().all(|z| *z == ZERO) {
        return Ok(rho.clone());
    }
    let u = linalg::unitary_from_hermitian(&generator, 1.0);
    let conj = linalg::matmul(&linalg::matmul(&u, &rho.matrix), &u.adjoint());
    let sym = (&conj + conj.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DensityMatrix::from_parts_unchecked(sym, rho.layout))
}

/// `Tr(ρ O)` for Hermitian `O`.
pub fn expectation(rho: &DensityMatrix, obs: &DenseOperator) -> Result<f64> {
    if rho.layout != obs.layout {
        return Err(SsgdError::LayoutMismatch(
            "state and observable live on different layouts".into(),
        ));
    }
    let herm = linalg::hermiticity_error(&obs.matrix);
    if herm > OBSERVABLE_TOL {
        return Err(SsgdError::NonHermitian(herm));
    }
    let value = linalg::trace_product(&rho.matrix, &obs.matrix);
    debug_assert!(
        value.im.abs() <= 1e-12 * (1.0 + linalg::max_abs(&obs.matrix) * rho.matrix.nrows() as f64),
        "expectation has imaginary part {}",
        value.im
    );
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, pauli_x, pauli_z, ONE};
    use crate::pauli::Axis;
    use crate::random::{random_density, random_hermitian, rng};

    fn sys(n: usize) -> RegisterLayout {
        RegisterLayout::system(n).unwrap()
    }

    #[test]
    fn attach_simple_cases() {
        let rho = DensityMatrix::basis_state(sys(1), 0).unwrap();
        let joint = attach_ancilla(&rho, 1).unwrap();
        let expected = DensityMatrix::basis_state(RegisterLayout::new(1, 1).unwrap(), 0).unwrap();
        assert_eq!(joint.matrix(), expected.matrix());

        let mixed = DensityMatrix::maximally_mixed(sys(1));
        assert_eq!(attach_ancilla(&mixed, 0).unwrap(), mixed);

        // |0><0| ⊗ I/2 has I/2 in the top-left block only.
        let joint = attach_ancilla(&mixed, 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j && i < 2 { 0.5 } else { 0.0 };
                assert_eq!(joint.matrix()[(i, j)], Complex64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn reset_cases() {
        let mut r = rng(11);
        let rho = random_density(2, &mut r);
        let back = reset_ancilla(&attach_ancilla(&rho, 2).unwrap()).unwrap();
        assert!(max_abs(&(back.matrix() - rho.matrix())) < 1e-15);

        // Bell state on (ancilla, system) reduces to I/2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![ONE * s, ZERO, ZERO, ONE * s]);
        let bell = DensityMatrix::pure(&psi, RegisterLayout::new(1, 1).unwrap()).unwrap();
        let reduced = reset_ancilla(&bell).unwrap();
        assert!(max_abs(&(reduced.matrix() - DensityMatrix::maximally_mixed(sys(1)).matrix())) < 1e-15);

        assert_eq!(reset_ancilla(&rho), Err(SsgdError::NoAncilla));
    }

    #[test]
    fn reset_matches_index_contraction() {
        let mut r = rng(3);
        let joint = random_density(2, &mut r);
        let joint = DensityMatrix::new(joint.into_matrix(), RegisterLayout::new(1, 1).unwrap()).unwrap();
        let reduced = reset_ancilla(&joint).unwrap();
        // ρ_S[s, s'] = Σ_a ρ[(a, s), (a, s')], index = a * 2 + s
        for s in 0..2 {
            for t in 0..2 {
                let mut acc = ZERO;
                for a in 0..2 {
                    acc += joint.matrix()[(a * 2 + s, a * 2 + t)];
                }
                assert!((reduced.matrix()[(s, t)] - acc).norm() <= 1e-13);
            }
        }
    }

    #[test]
    fn generator_step_cases() {
        let rho = DensityMatrix::basis_state(sys(1), 0).unwrap();
        let x0 = PauliString::single(1, 0, Axis::X).unwrap();
        let same = apply_generator_step(&rho, &[(0.0, x0)]).unwrap();
        assert_eq!(same, rho);

        let flipped = apply_generator_step(&rho, &[(std::f64::consts::FRAC_PI_2, x0)]).unwrap();
        let one = DensityMatrix::basis_state(sys(1), 1).unwrap();
        assert!(max_abs(&(flipped.matrix() - one.matrix())) < 1e-15);

        assert!(matches!(
            apply_generator_step(&rho, &[(f64::NAN, x0)]),
            Err(SsgdError::InvalidParameter(_))
        ));
        let wrong = PauliString::single(2, 0, Axis::X).unwrap();
        assert!(matches!(
            apply_generator_step(&rho, &[(0.1, wrong)]),
            Err(SsgdError::LayoutMismatch(_))
        ));
    }

    #[test]
    fn generator_step_preserves_invariants() {
        let mut r = rng(5);
        let rho = random_density(3, &mut r);
        let terms = vec![
            (0.3, PauliString::from_axes(3, &[(0, Axis::X), (1, Axis::Y)]).unwrap()),
            (-0.7, PauliString::from_axes(3, &[(1, Axis::Z), (2, Axis::X)]).unwrap()),
            (1.1, PauliString::single(3, 2, Axis::Y).unwrap()),
        ];
        let out = apply_generator_step(&rho, &terms).unwrap();
        let checked = DensityMatrix::new(out.matrix().clone(), *out.layout()).unwrap();
        let (before, _) = linalg::hermitian_eigh(rho.matrix());
        let (after, _) = linalg::hermitian_eigh(checked.matrix());
        for (a, b) in before.iter().zip(after.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_cases() {
        let z = DenseOperator::hermitian(pauli_z(), sys(1)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(sys(1));
        assert_eq!(expectation(&mixed, &z).unwrap(), 0.0);
        let up = DensityMatrix::basis_state(sys(1), 0).unwrap();
        assert_eq!(expectation(&up, &z).unwrap(), 1.0);

        let skew = pauli_x() * Complex64::new(0.0, 1.0);
        let bad = DenseOperator::new(skew, sys(1)).unwrap();
        assert!(matches!(expectation(&up, &bad), Err(SsgdError::NonHermitian(_))));
    }

    #[test]
    fn expectation_matches_eigenbasis_sum() {
        let mut r = rng(21);
        let rho = random_density(3, &mut r);
        let h = random_hermitian(3, &mut r);
        let (vals, vecs) = linalg::hermitian_eigh(h.matrix());
        let mut oracle = 0.0;
        for (k, lambda) in vals.iter().enumerate() {
            let v = vecs.column(k).into_owned();
            oracle += lambda * (v.adjoint() * rho.matrix() * &v)[(0, 0)].re;
        }
        assert!((expectation(&rho, &h).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn energy_invariant_under_ancilla() {
        let mut r = rng(8);
        let rho = random_density(2, &mut r);
        let h = random_hermitian(2, &mut r);
        let joint = attach_ancilla(&rho, 1).unwrap();
        let ht = h.extend_with_ancilla(1).unwrap();
        let diff = expectation(&joint, &ht).unwrap() - expectation(&rho, &h).unwrap();
        assert!(diff.abs() <= 1e-12);
    }

    #[test]
    fn validation_rejects_bad_states() {
        let l = sys(1);
        let m = CMatrix::from_row_slice(2, 2, &[ONE * 2.0, ZERO, ZERO, -ONE]);
        assert!(DensityMatrix::new(m, l).is_err());
        let m = CMatrix::from_row_slice(2, 2, &[ONE * 0.5, ONE, ZERO, ONE * 0.5]);
        assert!(DensityMatrix::new(m, l).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(4, 4), l).is_err());
    }

    #[test]
    fn sanitize_clamps_negative_spectrum() {
        let l = sys(1);
        let m = CMatrix::from_row_slice(2, 2, &[ONE * 1.001, ZERO, ZERO, ONE * -0.001]);
        let fixed = DensityMatrix::from_parts_unchecked(m, l).sanitized();
        assert!(DensityMatrix::new(fixed.matrix().clone(), l).is_ok());
    }

    #[test]
    fn bitstrings() {
        assert_eq!(bitstring_index("000111").unwrap(), 7);
        assert_eq!(bitstring_index("100").unwrap(), 4);
        assert_eq!(index_bitstring(7, 6), "000111");
        assert!(bitstring_index("01a").is_err());
        assert!(bitstring_index("").is_err());
    }
}
