//! Signed multi-qubit Pauli words and the register layout they live on.
//!
//! A word is stored as a pair of bit masks (`x`, `z`) over global qubit
//! indices together with a phase `i^k`. The per-qubit axis is read off the
//! bit pair: `(1,0) = X`, `(0,1) = Z`, `(1,1) = Y`. The stored phase multiplies
//! the tensor product of those axes, so `+1*Y0` really is the matrix `Y`.
//!
//! Global qubit 0 is the leftmost Kronecker factor (most significant bit of
//! the computational-basis index). Ancilla qubits take the lowest global
//! indices, system qubits follow.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsgdError};
use crate::linalg::{CMatrix, CVector, ZERO};

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub const NON_IDENTITY: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
    pub const ALL: [Axis; 4] = [Axis::I, Axis::X, Axis::Y, Axis::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Axis::I => (false, false),
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Axis::I,
            (true, false) => Axis::X,
            (true, true) => Axis::Y,
            (false, true) => Axis::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Product of two single-qubit Paulis as `(axis, k)` meaning `i^k * axis`.
fn axis_product(a: Axis, b: Axis) -> (Axis, u8) {
    use Axis::*;
    match (a, b) {
        (I, p) | (p, I) => (p, 0),
        (X, X) | (Y, Y) | (Z, Z) => (I, 0),
        (X, Y) => (Z, 1),
        (Y, Z) => (X, 1),
        (Z, X) => (Y, 1),
        (Y, X) => (Z, 3),
        (Z, Y) => (X, 3),
        (X, Z) => (Y, 3),
    }
}

/// A unit phase `i^k`, `k` taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// Split of the global register into an ancilla block and a system block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterLayout {
    n_system: usize,
    n_ancilla: usize,
}

impl RegisterLayout {
    pub fn new(n_system: usize, n_ancilla: usize) -> Result<Self> {
        if n_system == 0 {
            return Err(SsgdError::InvalidParameter(
                "a register needs at least one system qubit".into(),
            ));
        }
        if n_system + n_ancilla > MAX_QUBITS {
            return Err(SsgdError::TooLarge(n_system + n_ancilla));
        }
        Ok(Self {
            n_system,
            n_ancilla,
        })
    }

    pub fn system(n_system: usize) -> Result<Self> {
        Self::new(n_system, 0)
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn total(&self) -> usize {
        self.n_system + self.n_ancilla
    }

    pub fn dim(&self) -> usize {
        1usize << self.total()
    }

    /// Global index of ancilla qubit `a`.
    pub fn ancilla_qubit(&self, a: usize) -> usize {
        debug_assert!(a < self.n_ancilla);
        a
    }

    /// Global index of system qubit `s`.
    pub fn system_qubit(&self, s: usize) -> usize {
        debug_assert!(s < self.n_system);
        self.n_ancilla + s
    }

    pub fn is_ancilla(&self, global: usize) -> bool {
        global < self.n_ancilla
    }

    pub fn with_ancilla(&self, n_ancilla: usize) -> Result<Self> {
        Self::new(self.n_system, n_ancilla)
    }

    pub fn system_only(&self) -> Self {
        Self {
            n_system: self.n_system,
            n_ancilla: 0,
        }
    }

    /// Bit mask (over global indices) covering the ancilla block.
    pub fn ancilla_mask(&self) -> u64 {
        if self.n_ancilla == 0 {
            0
        } else {
            (1u64 << self.n_ancilla) - 1
        }
    }
}

/// A Pauli word `i^k * P_0 ⊗ P_1 ⊗ ...` on `n_qubits` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        Self {
            n_qubits,
            x: 0,
            z: 0,
            phase: Phase::ONE,
        }
    }

    /// Build a word from `(qubit, axis)` pairs. Repeated qubits multiply.
    pub fn from_axes(n_qubits: usize, axes: &[(usize, Axis)]) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(SsgdError::TooLarge(n_qubits));
        }
        let mut word = Self::identity(n_qubits);
        for &(q, axis) in axes {
            if q >= n_qubits {
                return Err(SsgdError::SupportOutsideLayout { qubit: q, n_qubits });
            }
            let (x, z) = axis.bits();
            let mut single = Self::identity(n_qubits);
            single.x = (x as u64) << q;
            single.z = (z as u64) << q;
            word = word.multiply(&single)?;
        }
        Ok(word)
    }

    pub fn single(n_qubits: usize, qubit: usize, axis: Axis) -> Result<Self> {
        Self::from_axes(n_qubits, &[(qubit, axis)])
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn axis(&self, q: usize) -> Axis {
        Axis::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    /// Qubits carrying a non-identity axis, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mask = self.support_mask();
        (0..self.n_qubits).filter(|q| (mask >> q) & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    /// Hermitian iff the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(SsgdError::LayoutMismatch(format!(
                "{} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    /// Exact signed product `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut k = self.phase.exponent() + other.phase.exponent();
        let both = self.support_mask() & other.support_mask();
        let mut rest = both;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (_, e) = axis_product(self.axis(q), other.axis(q));
            k += e;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: Phase::from_exponent(k % 4),
        })
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        let overlap = (self.x & other.z) ^ (self.z & other.x);
        Ok(overlap.count_ones() % 2 == 0)
    }

    /// `[a, b]` as a word: returns `ab` when the two anticommute, in which
    /// case the commutator equals twice the returned word; `None` when they
    /// commute.
    pub fn commutator(&self, other: &Self) -> Result<Option<Self>> {
        if self.commutes_with(other)? {
            Ok(None)
        } else {
            self.multiply(other).map(Some)
        }
    }

    /// `{a, b}` as a word: `ab` (the anticommutator being twice it) when the
    /// two commute, `None` otherwise.
    pub fn anticommutator(&self, other: &Self) -> Result<Option<Self>> {
        if self.commutes_with(other)? {
            self.multiply(other).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Bit masks expressed on computational-basis indices.
    fn basis_masks(&self) -> (usize, usize) {
        let n = self.n_qubits;
        let mut flip = 0usize;
        let mut sign = 0usize;
        for q in 0..n {
            let bit = 1usize << (n - 1 - q);
            if (self.x >> q) & 1 == 1 {
                flip |= bit;
            }
            if (self.z >> q) & 1 == 1 {
                sign |= bit;
            }
        }
        (flip, sign)
    }

    /// Column action `P|c> = amplitude(c) |c ^ flip>`.
    fn action(&self) -> BasisAction {
        let (flip, sign) = self.basis_masks();
        let n_y = (self.x & self.z).count_ones() as u8;
        BasisAction {
            flip,
            sign,
            base: Phase::from_exponent(self.phase.exponent() + n_y),
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != 1usize << self.n_qubits {
            return Err(SsgdError::LayoutMismatch(format!(
                "word on {} qubits applied to dimension {}",
                self.n_qubits, dim
            )));
        }
        Ok(())
    }

    /// Dense `2^n x 2^n` matrix on `layout`.
    pub fn to_dense(&self, layout: &RegisterLayout) -> Result<CMatrix> {
        let n = layout.total();
        if let Some(&q) = self.support().iter().find(|&&q| q >= n) {
            return Err(SsgdError::SupportOutsideLayout { qubit: q, n_qubits: n });
        }
        if self.n_qubits != n {
            return Err(SsgdError::LayoutMismatch(format!(
                "word on {} qubits, layout has {}",
                self.n_qubits, n
            )));
        }
        let dim = layout.dim();
        let act = self.action();
        let mut m = CMatrix::zeros(dim, dim);
        for c in 0..dim {
            m[(c ^ act.flip, c)] = act.amplitude(c);
        }
        Ok(m)
    }

    /// Basis-index form `P|c> = amps[c] |c ^ flip>` on `dim = 2^n_qubits`.
    pub(crate) fn column_action(&self) -> (usize, Vec<Complex64>) {
        let act = self.action();
        let dim = 1usize << self.n_qubits;
        (act.flip, (0..dim).map(|c| act.amplitude(c)).collect())
    }

    /// `P * M`.
    pub fn apply_left(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_dim(m.nrows())?;
        let act = self.action();
        let dim = m.nrows();
        let amps: Vec<Complex64> = (0..dim).map(|r| act.amplitude(r ^ act.flip)).collect();
        let mut out = CMatrix::zeros(dim, m.ncols());
        for col in 0..m.ncols() {
            let src = m.column(col);
            let mut dst = out.column_mut(col);
            for r in 0..dim {
                dst[r] = amps[r] * src[r ^ act.flip];
            }
        }
        Ok(out)
    }

    /// `M * P`.
    pub fn apply_right(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_dim(m.ncols())?;
        let act = self.action();
        let dim = m.ncols();
        let mut out = CMatrix::zeros(m.nrows(), dim);
        for col in 0..dim {
            let src = col ^ act.flip;
            let amp = act.amplitude(col);
            for r in 0..m.nrows() {
                out[(r, col)] = m[(r, src)] * amp;
            }
        }
        Ok(out)
    }

    /// `P |v>`.
    pub fn apply_vector(&self, v: &CVector) -> Result<CVector> {
        self.check_dim(v.len())?;
        let act = self.action();
        let mut out = CVector::zeros(v.len());
        for c in 0..v.len() {
            out[c ^ act.flip] = act.amplitude(c) * v[c];
        }
        Ok(out)
    }

    /// `Tr(P M)` in O(dim).
    pub fn trace_with(&self, m: &CMatrix) -> Result<Complex64> {
        self.check_dim(m.nrows())?;
        let act = self.action();
        let mut acc = ZERO;
        for c in 0..m.nrows() {
            // (P M)_{rr} = amp(r ^ flip) M_{r ^ flip, r}
            let src = c ^ act.flip;
            acc += act.amplitude(src) * m[(src, c)];
        }
        Ok(acc)
    }

    /// Add `coeff * P` into `target` in place.
    pub fn accumulate_into(&self, coeff: f64, target: &mut CMatrix) -> Result<()> {
        self.check_dim(target.nrows())?;
        let act = self.action();
        for c in 0..target.nrows() {
            target[(c ^ act.flip, c)] += act.amplitude(c) * coeff;
        }
        Ok(())
    }

    /// Shift every qubit index up by `offset`, growing the register to
    /// `n_qubits`. Used to lift system-local words onto a joint layout.
    pub fn embed(&self, n_qubits: usize, offset: usize) -> Result<Self> {
        if let Some(q) = self.support().into_iter().find(|q| q + offset >= n_qubits) {
            return Err(SsgdError::SupportOutsideLayout {
                qubit: q + offset,
                n_qubits,
            });
        }
        Ok(Self {
            n_qubits,
            x: self.x << offset,
            z: self.z << offset,
            phase: self.phase,
        })
    }

    /// Parse the text form `+1*X0.Z3` (phase, `*`, dot-joined axis-index
    /// pairs). The identity word is written `+1*I`.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let err = |reason: &str| SsgdError::Parse {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let text_trim = text.trim();
        let (phase_str, body) = text_trim
            .split_once('*')
            .ok_or_else(|| err("expected `<phase>*<axes>`"))?;
        let phase = match phase_str {
            "+1" | "1" => Phase::ONE,
            "-1" => Phase::MINUS_ONE,
            "+i" | "i" => Phase::I,
            "-i" => Phase::MINUS_I,
            _ => return Err(err("phase must be one of +1, -1, +i, -i")),
        };
        let mut axes = Vec::new();
        if body != "I" {
            let mut seen = 0u64;
            for token in body.split('.') {
                let mut chars = token.chars();
                let axis = match chars.next() {
                    Some('X') => Axis::X,
                    Some('Y') => Axis::Y,
                    Some('Z') => Axis::Z,
                    _ => return Err(err("axis must be X, Y or Z")),
                };
                let q: usize = chars
                    .as_str()
                    .parse()
                    .map_err(|_| err("qubit index must be a non-negative integer"))?;
                if q >= MAX_QUBITS || (seen >> q) & 1 == 1 {
                    return Err(err("qubit index repeated or out of range"));
                }
                seen |= 1 << q;
                axes.push((q, axis));
            }
        }
        let word = Self::from_axes(n_qubits, &axes)?;
        Ok(word.with_phase(phase))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*", self.phase)?;
        if self.is_identity() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self
            .support()
            .into_iter()
            .map(|q| format!("{}{}", self.axis(q).letter(), q))
            .collect();
        f.write_str(&parts.join("."))
    }
}

struct BasisAction {
    flip: usize,
    sign: usize,
    base: Phase,
}

impl BasisAction {
    #[inline]
    fn amplitude(&self, c: usize) -> Complex64 {
        let mut k = self.base.exponent();
        if (c & self.sign).count_ones() % 2 == 1 {
            k += 2;
        }
        Phase::from_exponent(k).to_complex()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, pauli_x, pauli_y, pauli_z, identity};
    use proptest::prelude::*;

    fn naive_kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        let (ar, ac) = a.shape();
        let (br, bc) = b.shape();
        let mut out = CMatrix::zeros(ar * br, ac * bc);
        for i in 0..ar {
            for j in 0..ac {
                for k in 0..br {
                    for l in 0..bc {
                        out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        out
    }

    fn single_matrix(axis: Axis) -> CMatrix {
        match axis {
            Axis::I => identity(2),
            Axis::X => pauli_x(),
            Axis::Y => pauli_y(),
            Axis::Z => pauli_z(),
        }
    }

    /// Kronecker-product oracle independent of the bitmask action.
    fn oracle_dense(p: &PauliString) -> CMatrix {
        let mut m = CMatrix::from_element(1, 1, p.phase().to_complex());
        for q in 0..p.n_qubits() {
            m = naive_kron(&m, &single_matrix(p.axis(q)));
        }
        m
    }

    #[test]
    fn single_qubit_table() {
        let x = PauliString::single(1, 0, Axis::X).unwrap();
        let y = PauliString::single(1, 0, Axis::Y).unwrap();
        let z = PauliString::single(1, 0, Axis::Z).unwrap();
        assert_eq!(x.multiply(&y).unwrap(), z.with_phase(Phase::I));
        let xx = x.multiply(&x).unwrap();
        assert!(xx.is_identity());
        assert_eq!(xx.phase(), Phase::ONE);
    }

    #[test]
    fn two_qubit_product() {
        // (X0 Z1)(Z0 Z1) = (XZ) ⊗ (ZZ) = -iY0
        let a = PauliString::from_axes(2, &[(0, Axis::X), (1, Axis::Z)]).unwrap();
        let b = PauliString::from_axes(2, &[(0, Axis::Z), (1, Axis::Z)]).unwrap();
        let ab = a.multiply(&b).unwrap();
        let expected = PauliString::single(2, 0, Axis::Y)
            .unwrap()
            .with_phase(Phase::MINUS_I);
        assert_eq!(ab, expected);
        let dense = oracle_dense(&a) * oracle_dense(&b);
        assert!(max_abs(&(dense - oracle_dense(&ab))) < 1e-15);
    }

    #[test]
    fn commutators() {
        let x = PauliString::single(1, 0, Axis::X).unwrap();
        let y = PauliString::single(1, 0, Axis::Y).unwrap();
        let c = x.commutator(&y).unwrap().unwrap();
        assert_eq!(c, PauliString::single(1, 0, Axis::Z).unwrap().with_phase(Phase::I));

        let x0 = PauliString::single(2, 0, Axis::X).unwrap();
        let x1 = PauliString::single(2, 1, Axis::X).unwrap();
        assert_eq!(x0.commutator(&x1).unwrap(), None);

        // [X0 Y1, Y0 Y1] = 2 (X0Y1)(Y0Y1) = 2 i Z0
        let a = PauliString::from_axes(2, &[(0, Axis::X), (1, Axis::Y)]).unwrap();
        let b = PauliString::from_axes(2, &[(0, Axis::Y), (1, Axis::Y)]).unwrap();
        let word = a.commutator(&b).unwrap().unwrap();
        assert_eq!(word, PauliString::single(2, 0, Axis::Z).unwrap().with_phase(Phase::I));
        let (da, db) = (oracle_dense(&a), oracle_dense(&b));
        let dense = &da * &db - &db * &da;
        assert!(max_abs(&(dense - oracle_dense(&word) * Complex64::new(2.0, 0.0))) < 1e-15);
    }

    #[test]
    fn dense_matches_kronecker() {
        let layout = RegisterLayout::system(1).unwrap();
        let id = PauliString::identity(1).to_dense(&layout).unwrap();
        assert!(max_abs(&(id - identity(2))) == 0.0);
        let z = PauliString::single(1, 0, Axis::Z).unwrap().to_dense(&layout).unwrap();
        assert!(max_abs(&(z - pauli_z())) == 0.0);

        let layout2 = RegisterLayout::system(2).unwrap();
        let xz = PauliString::from_axes(2, &[(0, Axis::X), (1, Axis::Z)]).unwrap();
        let expected = naive_kron(&pauli_x(), &pauli_z());
        assert!(max_abs(&(xz.to_dense(&layout2).unwrap() - expected)) == 0.0);
    }

    #[test]
    fn support_outside_layout() {
        let p = PauliString::single(3, 2, Axis::X).unwrap();
        let small = RegisterLayout::system(2).unwrap();
        assert!(matches!(
            p.to_dense(&small),
            Err(SsgdError::SupportOutsideLayout { .. })
        ));
        assert!(PauliString::single(2, 5, Axis::X).is_err());
    }

    #[test]
    fn layout_mismatch() {
        let a = PauliString::single(2, 0, Axis::X).unwrap();
        let b = PauliString::single(3, 0, Axis::X).unwrap();
        assert!(matches!(a.multiply(&b), Err(SsgdError::LayoutMismatch(_))));
        assert!(a.commutator(&b).is_err());
    }

    #[test]
    fn text_form() {
        let p = PauliString::parse("+1*X0.Z3", 4).unwrap();
        assert_eq!(p.axis(0), Axis::X);
        assert_eq!(p.axis(3), Axis::Z);
        assert_eq!(p.to_string(), "+1*X0.Z3");
        let q = PauliString::parse("-i*Y1", 2).unwrap();
        assert_eq!(q.phase(), Phase::MINUS_I);
        assert_eq!(PauliString::parse("+1*I", 2).unwrap(), PauliString::identity(2));
        assert!(PauliString::parse("X0", 2).is_err());
        assert!(PauliString::parse("+1*X0.X0", 2).is_err());
        assert!(PauliString::parse("+1*W0", 2).is_err());
        assert!(PauliString::parse("+1*X7", 2).is_err());
    }

    #[test]
    fn layout_rules() {
        assert!(RegisterLayout::new(0, 1).is_err());
        let l = RegisterLayout::new(3, 2).unwrap();
        assert_eq!(l.ancilla_qubit(1), 1);
        assert_eq!(l.system_qubit(0), 2);
        assert_eq!(l.dim(), 32);
        let mut seen: Vec<usize> = (0..2)
            .map(|a| l.ancilla_qubit(a))
            .chain((0..3).map(|s| l.system_qubit(s)))
            .collect();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2, 3, 4]);
    }

    fn arb_word(n: usize) -> impl Strategy<Value = PauliString> {
        (prop::collection::vec(0usize..4, n), 0u8..4).prop_map(move |(axes, k)| {
            let pairs: Vec<(usize, Axis)> = axes
                .iter()
                .enumerate()
                .map(|(q, &a)| (q, Axis::ALL[a]))
                .collect();
            PauliString::from_axes(n, &pairs)
                .unwrap()
                .with_phase(Phase::from_exponent(k))
        })
    }

    proptest! {
        #[test]
        fn product_matches_dense(a in arb_word(3), b in arb_word(3)) {
            let ab = a.multiply(&b).unwrap();
            let dense = oracle_dense(&a) * oracle_dense(&b);
            prop_assert!(max_abs(&(dense - oracle_dense(&ab))) <= 1e-14);
        }

        #[test]
        fn commutator_absent_iff_dense_zero(a in arb_word(3), b in arb_word(3)) {
            let (da, db) = (oracle_dense(&a), oracle_dense(&b));
            let dense = &da * &db - &db * &da;
            let absent = a.commutator(&b).unwrap().is_none();
            prop_assert_eq!(absent, max_abs(&dense) <= 1e-14);
        }

        #[test]
        fn squares_to_signed_identity(a in arb_word(4)) {
            let sq = a.multiply(&a).unwrap();
            prop_assert!(sq.is_identity());
            prop_assert!(sq.phase().is_real());
        }

        #[test]
        fn multiplication_associative(a in arb_word(3), b in arb_word(3), c in arb_word(3)) {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(a.multiply(&PauliString::identity(3)).unwrap(), a);
        }

        #[test]
        fn fast_actions_match_dense(a in arb_word(3), seed in 0u64..1000) {
            let layout = RegisterLayout::system(3).unwrap();
            let p = oracle_dense(&a);
            prop_assert!(max_abs(&(a.to_dense(&layout).unwrap() - &p)) <= 1e-15);
            let m = CMatrix::from_fn(8, 8, |i, j| {
                let t = (seed as f64) + 0.37 * i as f64 - 1.3 * j as f64;
                Complex64::new(t.sin(), (1.7 * t).cos())
            });
            prop_assert!(max_abs(&(a.apply_left(&m).unwrap() - &p * &m)) <= 1e-14);
            prop_assert!(max_abs(&(a.apply_right(&m).unwrap() - &m * &p)) <= 1e-14);
            let tr = (&p * &m).trace();
            prop_assert!((a.trace_with(&m).unwrap() - tr).norm() <= 1e-13);
        }

        #[test]
        fn text_round_trip(a in arb_word(5)) {
            let back = PauliString::parse(&a.to_string(), 5).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
