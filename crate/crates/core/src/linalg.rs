//! Dense complex linear algebra used throughout the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
///
/// Only the lower triangle is read, so callers are expected to have checked
/// Hermiticity already.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenpairs of a real symmetric matrix, ascending, with each eigenvector's
/// largest-magnitude entry made positive so the output is reproducible.
pub fn symmetric_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let pivot = col.iter().copied().fold(0.0_f64, |acc, v| {
            if v.abs() > acc.abs() + 1e-12 {
                v
            } else {
                acc
            }
        });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    (values, vectors)
}

/// `exp(-i t M)` for Hermitian `M`, built from its eigendecomposition.
pub fn unitary_from_hermitian(m: &CMatrix, t: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigh(m);
    let mut scaled = vectors.clone();
    for (j, lambda) in values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -t * lambda);
        for v in scaled.column_mut(j).iter_mut() {
            *v *= phase;
        }
    }
    matmul(&scaled, &vectors.adjoint())
}

fn split(a: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

/// `A B` through real matrix products, which use the blocked GEMM kernel.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let mut re = &ar * &br;
    re.gemm(-1.0, &ai, &bi, 1.0);
    let mut im = &ar * &bi;
    im.gemm(1.0, &ai, &br, 1.0);
    re.zip_map(&im, Complex64::new)
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().copied().sum()
}

/// Largest entry-wise modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A - A^dag|`.
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    matmul(a, b) - matmul(b, a)
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    matmul(a, b) + matmul(b, a)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Single-qubit Pauli matrices in the computational basis.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matches_naive() {
        let a = CMatrix::from_fn(5, 5, |i, j| Complex64::new(i as f64 - 1.5 * j as f64, (i * j) as f64 * 0.3));
        let b = CMatrix::from_fn(5, 5, |i, j| Complex64::new((i + 2 * j) as f64 * 0.1, 1.0 - j as f64));
        assert!(max_abs(&(matmul(&a, &b) - &a * &b)) < 1e-12);
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[ONE * 2.0, Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), -ONE],
        );
        let (vals, vecs) = hermitian_eigh(&m);
        assert!(vals[0] <= vals[1]);
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            2,
            vals.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let back = &vecs * diag * vecs.adjoint();
        assert!(max_abs(&(back - m)) < 1e-13);
    }

    #[test]
    fn pauli_rotation_by_half_pi() {
        // exp(-i pi/2 X) = -i X
        let u = unitary_from_hermitian(&pauli_x(), std::f64::consts::FRAC_PI_2);
        let expected = pauli_x() * (-I);
        assert!(max_abs(&(u - expected)) < 1e-14);
    }

    #[test]
    fn symmetric_eigh_sign_fixed() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        let (vals, vecs) = symmetric_eigh(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!(vecs[(0, 0)] > 0.0 || vecs[(1, 0)] > 0.0);
    }
}
