//! Seeded random instances: states, observables, Haar unitaries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector};
use crate::pauli::RegisterLayout;
use crate::state::{DenseOperator, DensityMatrix};

pub type SimRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under a master seed.
pub fn stream(seed: u64, index: u64) -> SimRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    // column-major fill keeps the draw order fixed
    CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector.
pub fn haar_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Full-rank random mixed state `G G† / Tr(G G†)` on `n` system qubits.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let layout = RegisterLayout::system(n).expect("n >= 1");
    let g = gaussian_matrix(layout.dim(), rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    let m = w * Complex64::new(1.0 / tr, 0.0);
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(m, layout).expect("Wishart matrix is a valid state")
}

/// GUE-like Hermitian operator `(G + G†)/2` on `n` system qubits.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseOperator {
    let layout = RegisterLayout::system(n).expect("n >= 1");
    let g = gaussian_matrix(layout.dim(), rng);
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    DenseOperator::hermitian(h, layout).expect("symmetrized matrix is Hermitian")
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(dim, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q.clone();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for z in u.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    u
}

pub fn real_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}
