//! Generator families driving each update: system words `G_S`, ancilla-coupled
//! words `G_A`, and the alternating brickwall schedule.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SsgdError};
use crate::models::Boundary;
use crate::pauli::{Axis, PauliString, Phase, RegisterLayout};

/// Ordered generator lists on a joint layout.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    system: Vec<PauliString>,
    ancilla: Vec<PauliString>,
    k: usize,
    layout: RegisterLayout,
}

/// True when some ancilla qubit carries X or Y, i.e. `<0|P_A|0> = 0`.
pub fn flips_ancilla(p: &PauliString, layout: &RegisterLayout) -> bool {
    p.x_mask() & layout.ancilla_mask() != 0
}

impl GeneratorSet {
    /// Validates and wraps explicit lists.
    pub fn new(
        system: Vec<PauliString>,
        ancilla: Vec<PauliString>,
        k: usize,
        layout: RegisterLayout,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for p in system.iter().chain(ancilla.iter()) {
            if p.n_qubits() != layout.total() {
                return Err(SsgdError::LayoutMismatch(format!(
                    "generator {p} on {} qubits, layout has {}",
                    p.n_qubits(),
                    layout.total()
                )));
            }
            if p.is_identity() {
                return Err(SsgdError::InvalidParameter("identity generator".into()));
            }
            if p.phase() != Phase::ONE {
                return Err(SsgdError::InvalidParameter(format!(
                    "generator {p} must carry phase +1"
                )));
            }
            if !seen.insert(*p) {
                return Err(SsgdError::InvalidParameter(format!("duplicate generator {p}")));
            }
        }
        for p in &system {
            if p.support_mask() & layout.ancilla_mask() != 0 {
                return Err(SsgdError::GeneratorOnAncilla(p.to_string()));
            }
        }
        for p in &ancilla {
            if !flips_ancilla(p, &layout) {
                return Err(SsgdError::AncillaFilter(p.to_string()));
            }
        }
        Ok(Self {
            system,
            ancilla,
            k,
            layout,
        })
    }

    /// Parse text-form words (global indices on `layout`) and split them by
    /// whether they touch the ancilla register.
    pub fn custom(words: &[String], layout: RegisterLayout) -> Result<Self> {
        let mut system = Vec::new();
        let mut ancilla = Vec::new();
        let mut k = 0;
        for w in words {
            let p = PauliString::parse(w, layout.total())?;
            k = k.max(p.weight());
            if p.support_mask() & layout.ancilla_mask() != 0 {
                ancilla.push(p);
            } else {
                system.push(p);
            }
        }
        Self::new(system, ancilla, k, layout)
    }

    pub fn system(&self) -> &[PauliString] {
        &self.system
    }

    pub fn ancilla(&self) -> &[PauliString] {
        &self.ancilla
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.system.len() + self.ancilla.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same system words, no ancilla words: purely unitary updates.
    pub fn without_ancilla(&self) -> Self {
        Self {
            system: self.system.clone(),
            ancilla: Vec::new(),
            k: self.k,
            layout: self.layout,
        }
    }

    /// System words re-indexed onto a register with no ancilla.
    pub fn system_only_words(&self) -> Result<Vec<PauliString>> {
        let shift = self.layout.n_ancilla();
        let n = self.layout.n_system();
        self.system
            .iter()
            .map(|p| {
                let axes: Vec<_> = p.support().into_iter().map(|q| (q - shift, p.axis(q))).collect();
                PauliString::from_axes(n, &axes).map(|w| w.with_phase(p.phase()))
            })
            .collect()
    }
}

/// Windows of `width` adjacent system sites, by start site.
fn windows(n: usize, width: usize, boundary: Boundary) -> Vec<Vec<usize>> {
    if width == 0 {
        return vec![Vec::new()];
    }
    match boundary {
        Boundary::Open => (0..=n - width)
            .map(|s| (s..s + width).collect())
            .collect(),
        Boundary::Periodic if width < n => (0..n)
            .map(|s| (0..width).map(|o| (s + o) % n).collect())
            .collect(),
        Boundary::Periodic => vec![(0..n).collect()],
    }
}

/// Every axis assignment on `sites` in lexicographic order (I < X < Y < Z,
/// first site most significant).
fn assignments(sites: &[usize]) -> Vec<Vec<(usize, Axis)>> {
    let mut out = vec![Vec::new()];
    for &s in sites {
        let mut next = Vec::with_capacity(out.len() * 4);
        for prefix in &out {
            for axis in Axis::ALL {
                let mut v = prefix.clone();
                if axis != Axis::I {
                    v.push((s, axis));
                }
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// `G_S`: every non-identity word on `k` adjacent system sites; `G_A`: X or Y
/// on the single ancilla times any word (identity included) on `k-1`
/// adjacent system sites. Windows wrap when `boundary` is periodic.
pub fn build_standard(k: usize, layout: RegisterLayout, boundary: Boundary) -> Result<GeneratorSet> {
    if layout.n_ancilla() != 1 {
        return Err(SsgdError::InvalidParameter(
            "standard generator sets use exactly one ancilla qubit".into(),
        ));
    }
    let n = layout.n_system();
    if k == 0 || k > n {
        return Err(SsgdError::InvalidParameter(format!(
            "locality k = {k} must lie in 1..={n}"
        )));
    }
    let total = layout.total();
    let global = |site: usize| layout.system_qubit(site);

    let mut seen = HashSet::new();
    let mut system = Vec::new();
    for window in windows(n, k, boundary) {
        for axes in assignments(&window) {
            if axes.is_empty() {
                continue;
            }
            let lifted: Vec<(usize, Axis)> = axes.iter().map(|&(s, a)| (global(s), a)).collect();
            let p = PauliString::from_axes(total, &lifted)?;
            if seen.insert(p) {
                system.push(p);
            }
        }
    }

    let mut ancilla = Vec::new();
    let anc = layout.ancilla_qubit(0);
    for window in windows(n, k - 1, boundary) {
        for anc_axis in [Axis::X, Axis::Y] {
            for axes in assignments(&window) {
                let mut lifted: Vec<(usize, Axis)> = vec![(anc, anc_axis)];
                lifted.extend(axes.iter().map(|&(s, a)| (global(s), a)));
                let p = PauliString::from_axes(total, &lifted)?;
                if seen.insert(p) {
                    ancilla.push(p);
                }
            }
        }
    }
    GeneratorSet::new(system, ancilla, k, layout)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrickPhase {
    AncillaLayer,
    EvenBonds,
    OddBonds,
}

/// Cyclic schedule `[ancilla, even, ancilla, odd]` on a register with one
/// ancilla per system qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct BrickwallSchedule {
    n_system: usize,
    boundary: Boundary,
    phases: Vec<BrickPhase>,
}

pub fn build_brickwall(n_system: usize, boundary: Boundary) -> Result<BrickwallSchedule> {
    if n_system == 0 || n_system % 2 != 0 {
        return Err(SsgdError::InvalidParameter(format!(
            "brickwall schedule needs an even, positive system size (got {n_system})"
        )));
    }
    Ok(BrickwallSchedule {
        n_system,
        boundary,
        phases: vec![
            BrickPhase::AncillaLayer,
            BrickPhase::EvenBonds,
            BrickPhase::AncillaLayer,
            BrickPhase::OddBonds,
        ],
    })
}

impl BrickwallSchedule {
    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn period(&self) -> usize {
        self.phases.len()
    }

    pub fn phase(&self, t: usize) -> BrickPhase {
        self.phases[t % self.phases.len()]
    }

    /// Joint layout: system qubit `j` pairs with ancilla `j`.
    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout::new(self.n_system, self.n_system).expect("validated size")
    }

    /// Pairs `(0,1), (2,3), ...` (0-based sites).
    pub fn even_bonds(&self) -> Vec<(usize, usize)> {
        (0..self.n_system / 2).map(|j| (2 * j, 2 * j + 1)).collect()
    }

    /// Pairs `(1,2), (3,4), ...` plus `(n-1, 0)` when periodic.
    pub fn odd_bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_system;
        let mut bonds: Vec<(usize, usize)> = (0..n / 2)
            .filter(|j| 2 * j + 2 < n)
            .map(|j| (2 * j + 1, 2 * j + 2))
            .collect();
        if self.boundary == Boundary::Periodic {
            bonds.push((n - 1, 0));
        }
        bonds
    }

    pub fn bonds(&self, phase: BrickPhase) -> Vec<(usize, usize)> {
        match phase {
            BrickPhase::EvenBonds => self.even_bonds(),
            BrickPhase::OddBonds => self.odd_bonds(),
            BrickPhase::AncillaLayer => Vec::new(),
        }
    }

    /// The generator set active at iteration `t`.
    pub fn gens_at_phase(&self, t: usize) -> GeneratorSet {
        let layout = self.layout();
        let total = layout.total();
        let phase = self.phase(t);
        let mut system = Vec::new();
        let mut ancilla = Vec::new();
        match phase {
            BrickPhase::AncillaLayer => {
                for j in 0..self.n_system {
                    let a = layout.ancilla_qubit(j);
                    let s = layout.system_qubit(j);
                    for anc_axis in [Axis::X, Axis::Y] {
                        for sys_axis in Axis::ALL {
                            let mut axes = vec![(a, anc_axis)];
                            if sys_axis != Axis::I {
                                axes.push((s, sys_axis));
                            }
                            ancilla.push(PauliString::from_axes(total, &axes).expect("in range"));
                        }
                    }
                }
            }
            BrickPhase::EvenBonds | BrickPhase::OddBonds => {
                let mut seen = HashSet::new();
                for (i, j) in self.bonds(phase) {
                    let sites = [layout.system_qubit(i), layout.system_qubit(j)];
                    for axes in assignments(&sites) {
                        if axes.is_empty() {
                            continue;
                        }
                        let p = PauliString::from_axes(total, &axes).expect("in range");
                        if seen.insert(p) {
                            system.push(p);
                        }
                    }
                }
            }
        }
        GeneratorSet::new(system, ancilla, 2, layout).expect("brickwall words are valid")
    }
}
