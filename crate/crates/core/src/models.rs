//! Benchmark Hamiltonians: the 1D transverse-field Ising chain and a ring of
//! Rydberg atoms, plus the observables used to read out their phases.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsgdError};
use crate::linalg::{self, CMatrix};
use crate::pauli::{Axis, PauliString, RegisterLayout};
use crate::state::{DenseOperator, DensityMatrix, MAX_DENSE_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl Boundary {
    /// Nearest-neighbour bonds `(i, i+1)`, plus `(n-1, 0)` when periodic.
    pub fn bonds(self, n: usize) -> Vec<(usize, usize)> {
        let mut bonds: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self == Boundary::Periodic && n > 2 {
            bonds.push((n - 1, 0));
        }
        bonds
    }
}

/// `H = -J Σ Z_i Z_{i+1} - h_x Σ X_i - h_z Σ Z_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    pub n_sites: usize,
    pub j: f64,
    pub h_x: f64,
    pub h_z: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl TfimParams {
    pub fn new(n_sites: usize, j: f64, h_x: f64, h_z: f64) -> Self {
        Self {
            n_sites,
            j,
            h_x,
            h_z,
            boundary: Boundary::Open,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(SsgdError::InvalidParameter("TFIM needs at least 2 sites".into()));
        }
        if self.n_sites > MAX_DENSE_QUBITS {
            return Err(SsgdError::TooLarge(self.n_sites));
        }
        if ![self.j, self.h_x, self.h_z].iter().all(|v| v.is_finite()) {
            return Err(SsgdError::InvalidParameter("TFIM couplings must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    #[default]
    Ring,
}

/// Rydberg chain parameters in laboratory units (MHz, μm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RydbergParams {
    pub n_atoms: usize,
    /// Ω/2π in MHz.
    pub rabi_over_2pi: f64,
    /// Nearest-neighbour spacing a in μm.
    pub lattice_spacing: f64,
    /// R_b in μm, fixing C6 = Ω R_b^6.
    pub blockade_radius: f64,
    /// Δ_glob/2π in MHz.
    pub detuning_glob_over_2pi: f64,
    /// Δ_loc/2π in MHz.
    pub detuning_loc_over_2pi: f64,
    #[serde(default)]
    pub geometry: Geometry,
}

impl RydbergParams {
    /// The ring used for the metastability study: R_b = 9.76 μm, a = 8 μm,
    /// Δ_glob/2π = 2.5 MHz, Δ_loc/2π = 0.625 MHz.
    pub fn ring(n_atoms: usize, rabi_over_2pi: f64) -> Self {
        Self {
            n_atoms,
            rabi_over_2pi,
            lattice_spacing: 8.0,
            blockade_radius: 9.76,
            detuning_glob_over_2pi: 2.5,
            detuning_loc_over_2pi: 0.625,
            geometry: Geometry::Ring,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms < 2 || self.n_atoms % 2 != 0 {
            return Err(SsgdError::InvalidParameter(
                "Rydberg ring needs an even number of atoms, at least 2".into(),
            ));
        }
        if self.n_atoms > MAX_DENSE_QUBITS {
            return Err(SsgdError::TooLarge(self.n_atoms));
        }
        let all = [
            self.rabi_over_2pi,
            self.lattice_spacing,
            self.blockade_radius,
            self.detuning_glob_over_2pi,
            self.detuning_loc_over_2pi,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(SsgdError::InvalidParameter("Rydberg parameters must be finite".into()));
        }
        if self.lattice_spacing <= 0.0 || self.blockade_radius <= 0.0 {
            return Err(SsgdError::InvalidParameter("lengths must be positive".into()));
        }
        if self.rabi_over_2pi < 0.0 {
            return Err(SsgdError::InvalidParameter("Rabi frequency must be non-negative".into()));
        }
        Ok(())
    }

    /// Ω in rad/μs.
    pub fn rabi(&self) -> f64 {
        2.0 * PI * self.rabi_over_2pi
    }

    /// Δ_j = Δ_glob + (-1)^j Δ_loc in rad/μs.
    pub fn detuning(&self, site: usize) -> f64 {
        let sign = if site % 2 == 0 { 1.0 } else { -1.0 };
        2.0 * PI * (self.detuning_glob_over_2pi + sign * self.detuning_loc_over_2pi)
    }

    /// C6 = Ω R_b^6 in rad/μs · μm^6.
    pub fn c6(&self) -> f64 {
        self.rabi() * self.blockade_radius.powi(6)
    }

    /// Atom positions on a circle whose chord between neighbours equals `a`.
    pub fn positions(&self) -> Vec<(f64, f64)> {
        let n = self.n_atoms as f64;
        let radius = self.lattice_spacing / (2.0 * (PI / n).sin());
        (0..self.n_atoms)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / n;
                (radius * phi.cos(), radius * phi.sin())
            })
            .collect()
    }

    /// V_ij = C6 / |r_i - r_j|^6 for every pair `i < j`.
    pub fn interactions(&self) -> Result<Vec<(usize, usize, f64)>> {
        let pos = self.positions();
        let c6 = self.c6();
        let mut out = Vec::new();
        for i in 0..self.n_atoms {
            for j in (i + 1)..self.n_atoms {
                let d = ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
                if d <= 1e-12 * self.lattice_spacing {
                    return Err(SsgdError::InvalidParameter(format!(
                        "atoms {i} and {j} coincide"
                    )));
                }
                out.push((i, j, c6 / d.powi(6)));
            }
        }
        Ok(out)
    }
}

/// Occupation `n_q = (1 - Z_q)/2` of basis index `c`, qubit 0 most significant.
fn bit(c: usize, q: usize, n: usize) -> f64 {
    ((c >> (n - 1 - q)) & 1) as f64
}

fn z_value(c: usize, q: usize, n: usize) -> f64 {
    1.0 - 2.0 * bit(c, q, n)
}

/// Adds `coeff * X_q` for every site to the dense matrix.
fn add_transverse(m: &mut CMatrix, n: usize, coeff: f64) -> Result<()> {
    if coeff == 0.0 {
        return Ok(());
    }
    for q in 0..n {
        PauliString::single(n, q, Axis::X)?.accumulate_into(coeff, m)?;
    }
    Ok(())
}

pub fn build_tfim(p: &TfimParams) -> Result<DenseOperator> {
    p.validate()?;
    let n = p.n_sites;
    let layout = RegisterLayout::system(n)?;
    let dim = layout.dim();
    let bonds = p.boundary.bonds(n);
    let mut m = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        let zz: f64 = bonds
            .iter()
            .map(|&(a, b)| z_value(c, a, n) * z_value(c, b, n))
            .sum();
        let z: f64 = (0..n).map(|q| z_value(c, q, n)).sum();
        m[(c, c)] = Complex64::new(-p.j * zz - p.h_z * z, 0.0);
    }
    add_transverse(&mut m, n, -p.h_x)?;
    DenseOperator::hermitian(m, layout)
}

/// `H = Σ (Ω/2 X_i - Δ_i n_i) + Σ_{i<j} V_ij n_i n_j`, in rad/μs.
pub fn build_rydberg(p: &RydbergParams) -> Result<DenseOperator> {
    p.validate()?;
    let n = p.n_atoms;
    let layout = RegisterLayout::system(n)?;
    let dim = layout.dim();
    let pairs = p.interactions()?;
    let detunings: Vec<f64> = (0..n).map(|q| p.detuning(q)).collect();
    let mut m = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        let single: f64 = (0..n).map(|q| -detunings[q] * bit(c, q, n)).sum();
        let pair: f64 = pairs
            .iter()
            .map(|&(i, j, v)| v * bit(c, i, n) * bit(c, j, n))
            .sum();
        m[(c, c)] = Complex64::new(single + pair, 0.0);
    }
    add_transverse(&mut m, n, p.rabi() / 2.0)?;
    DenseOperator::hermitian(m, layout)
}

/// Global spin flip `∏ X_i` on `n` system qubits.
pub fn spin_flip(n: usize) -> Result<DenseOperator> {
    let layout = RegisterLayout::system(n)?;
    let axes: Vec<(usize, Axis)> = (0..n).map(|q| (q, Axis::X)).collect();
    let p = PauliString::from_axes(n, &axes)?;
    DenseOperator::new(p.to_dense(&layout)?, layout)
}

/// `N_e = (1/N) Σ_j (-1)^j <Z_j>`, sites counted from 0.
pub fn neel_order(rho: &DensityMatrix) -> Result<f64> {
    let layout = rho.layout();
    if layout.n_ancilla() != 0 {
        return Err(SsgdError::LayoutMismatch(
            "Néel order is defined on system-only states".into(),
        ));
    }
    let n = layout.n_system();
    let pops = rho.populations();
    let mut total = 0.0;
    for (c, w) in pops.iter().enumerate() {
        let stag: f64 = (0..n)
            .map(|q| if q % 2 == 0 { 1.0 } else { -1.0 } * z_value(c, q, n))
            .sum();
        total += w * stag;
    }
    Ok(total / n as f64)
}

/// Ground energy and the full ascending spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub ground: f64,
    pub energies: Vec<f64>,
}

pub fn reference_energies(h: &DenseOperator) -> Spectrum {
    let (energies, _) = linalg::hermitian_eigh(h.matrix());
    Spectrum {
        ground: energies[0],
        energies,
    }
}

/// Lowest eigenpair of `h`.
pub fn ground_state(h: &DenseOperator) -> (f64, linalg::CVector) {
    let (vals, vecs) = linalg::hermitian_eigh(h.matrix());
    (vals[0], vecs.column(0).into_owned())
}
