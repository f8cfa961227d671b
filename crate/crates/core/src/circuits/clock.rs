use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Gate, GateCircuit, STATEVECTOR_CAP};
use crate::linalg::{basis_vector, Complex64, DenseHermitian, SparseSymmetricMatrix};
use crate::{Error, Result};

/// Factor between `A = ½(W + W†)` and the stored matrix. With Hadamard-type
/// steps, `2√2·A` has entries in `{−1, 0, +1}`.
pub const CLOCK_SCALE: f64 = 2.0 * std::f64::consts::SQRT_2;

/// How the gates of `U` become clock steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lowering {
    /// One gate per step.
    #[default]
    Literal,
    /// Every Hadamard-type gate opens a step; signed-permutation gates
    /// (σz, X, CX, CCX) join the step before them, or the first step when
    /// they lead the circuit.
    Folded,
}

/// One clock step `S_l`: a product of gates applied left to right, equal to
/// `2^{−h/2}` times a signed integer matrix where `h` counts Hadamard-type gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    gates: Vec<Gate>,
    hadamards: u32,
}

impl Step {
    fn new(gates: Vec<Gate>) -> Self {
        let hadamards = gates.iter().filter(|g| g.is_hadamard_type()).count() as u32;
        Self { gates, hadamards }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn hadamards(&self) -> u32 {
        self.hadamards
    }

    /// Integer coefficients of `S|k⟩` (before the `2^{−h/2}` factor).
    pub fn action(&self, width: usize, k: usize) -> Vec<(usize, i64)> {
        compose(self.gates.iter().copied(), width, k)
    }

    /// Integer coefficients of row `i` of `S`, i.e. `Sᵀ|i⟩`.
    pub fn row(&self, width: usize, i: usize) -> Vec<(usize, i64)> {
        compose(self.gates.iter().rev().map(Gate::adjoint), width, i)
    }
}

fn compose(gates: impl Iterator<Item = Gate>, width: usize, k: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(k, 1i64)];
    for g in gates {
        let mut next: Vec<(usize, i64)> = terms
            .iter()
            .flat_map(|&(idx, c)| {
                g.action(width, idx)
                    .iter()
                    .map(move |(i, s)| (i, c * i64::from(s)))
                    .collect::<Vec<_>>()
            })
            .collect();
        merge_terms(&mut next);
        terms = next;
    }
    terms
}

fn merge_terms<T: Copy + Default + PartialEq + std::ops::AddAssign>(terms: &mut Vec<(usize, T)>) {
    terms.sort_by_key(|&(i, _)| i);
    let mut merged: Vec<(usize, T)> = Vec::with_capacity(terms.len());
    for &(i, c) in terms.iter() {
        match merged.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => merged.push((i, c)),
        }
    }
    merged.retain(|&(_, c)| c != T::default());
    *terms = merged;
}

/// `2^{(1−h)/2}`: the stored magnitude of a unit integer coefficient.
fn step_factor(h: u32) -> f64 {
    match h {
        0 => std::f64::consts::SQRT_2,
        1 => 1.0,
        2 => std::f64::consts::FRAC_1_SQRT_2,
        _ => 2f64.powf((1.0 - f64::from(h)) / 2.0),
    }
}

/// Row that breaks the "four entries, all ±1" structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowViolation {
    pub row: usize,
    pub nonzeros: usize,
    pub values: Vec<f64>,
}

/// The clock Hermitian `2√2·A` with `A = ½(W + W†)`,
/// `W = Σ_l |l+1⟩⟨l| ⊗ S_l` (clock index modulo `M`).
///
/// Basis index of `|l⟩ ⊗ |i⟩` is `l·Ñ + i`.
#[derive(Clone, Debug)]
pub struct ClockHermitian {
    u: GateCircuit,
    lowering: Lowering,
    steps: Arc<Vec<Step>>,
    system_dim: usize,
    start_index: usize,
    a_matrix: SparseSymmetricMatrix,
}

/// Clock Hermitian with one gate per step.
pub fn build_clock_hermitian(u: &GateCircuit) -> Result<ClockHermitian> {
    build_clock_hermitian_with(u, Lowering::Literal)
}

pub fn build_clock_hermitian_with(u: &GateCircuit, lowering: Lowering) -> Result<ClockHermitian> {
    if u.width() > STATEVECTOR_CAP {
        return Err(Error::StatevectorCapExceeded {
            qubits: u.width(),
            cap: STATEVECTOR_CAP,
        });
    }
    let steps = lower(u.gates(), lowering)?;
    let m = steps.len();
    let system_dim = u.dimension();
    let width = u.width();
    let steps = Arc::new(steps);
    let max_row_nonzeros = (0..m)
        .map(|l| (1usize << steps[(l + m - 1) % m].hadamards) + (1usize << steps[l].hadamards))
        .max()
        .unwrap_or(0);
    let oracle_steps = Arc::clone(&steps);
    let a_matrix = SparseSymmetricMatrix::from_oracle(m * system_dim, max_row_nonzeros, CLOCK_SCALE, move |r| {
        clock_row(&oracle_steps, width, system_dim, r)
    });
    Ok(ClockHermitian {
        u: u.clone(),
        lowering,
        steps,
        system_dim,
        start_index: u.initial_index(),
        a_matrix,
    })
}

fn lower(gates: &[Gate], lowering: Lowering) -> Result<Vec<Step>> {
    let steps: Vec<Step> = match lowering {
        Lowering::Literal => gates.iter().map(|&g| Step::new(vec![g])).collect(),
        Lowering::Folded => {
            let mut groups: Vec<Vec<Gate>> = Vec::new();
            let mut leading: Vec<Gate> = Vec::new();
            for &g in gates {
                if g.is_hadamard_type() {
                    let mut group = std::mem::take(&mut leading);
                    group.push(g);
                    groups.push(group);
                } else if let Some(last) = groups.last_mut() {
                    last.push(g);
                } else {
                    leading.push(g);
                }
            }
            if !leading.is_empty() {
                return Err(Error::InvalidParameter(
                    "folded lowering needs at least one Hadamard-type gate".into(),
                ));
            }
            groups.into_iter().map(Step::new).collect()
        }
    };
    if steps.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "a clock needs at least 3 steps, the {lowering:?} lowering gives {}",
            steps.len()
        )));
    }
    Ok(steps)
}

fn clock_row(steps: &[Step], width: usize, n: usize, r: usize) -> Vec<(usize, f64)> {
    let m = steps.len();
    let (l, i) = (r / n, r % n);
    let prev = (l + m - 1) % m;
    let next = (l + 1) % m;
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(4);
    // W: ⟨l, i|W|l−1, k⟩ = (S_{l−1})_{ik}.
    let f = step_factor(steps[prev].hadamards);
    for (k, c) in steps[prev].row(width, i) {
        entries.push((prev * n + k, c as f64 * f));
    }
    // W†: ⟨l, i|W†|l+1, k⟩ = (S_l)_{ki}.
    let f = step_factor(steps[l].hadamards);
    for (k, c) in steps[l].action(width, i) {
        entries.push((next * n + k, c as f64 * f));
    }
    merge_terms(&mut entries);
    entries
}

impl ClockHermitian {
    /// `M`, the number of clock steps.
    pub fn clock_size(&self) -> usize {
        self.steps.len()
    }

    /// `Ñ = 2^width`.
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn width(&self) -> usize {
        self.u.width()
    }

    pub fn dimension(&self) -> usize {
        self.clock_size() * self.system_dim
    }

    /// Index `j` of `|0⟩ ⊗ |x, 0⟩`.
    pub fn start_index(&self) -> usize {
        self.start_index
    }

    /// Index of `|0⟩ ⊗ |k⟩` for a system basis state `k`.
    pub fn index_of(&self, clock: usize, system: usize) -> usize {
        clock * self.system_dim + system
    }

    pub fn start_state(&self) -> Vec<Complex64> {
        basis_vector(self.dimension(), self.start_index)
    }

    pub fn lowering(&self) -> Lowering {
        self.lowering
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn u_circuit(&self) -> &GateCircuit {
        &self.u
    }

    /// The scaled operator `2√2·A` as a row oracle.
    pub fn a_matrix(&self) -> &SparseSymmetricMatrix {
        &self.a_matrix
    }

    /// `A = ½(W + W†)` itself, materialized.
    pub fn unit_matrix(&self) -> Result<DenseHermitian> {
        Ok(self.a_matrix.materialize()?.scaled(1.0 / CLOCK_SCALE))
    }

    /// Rows of the scaled operator that do not have exactly four entries ±1.
    pub fn row_violations(&self) -> Vec<RowViolation> {
        (0..self.dimension())
            .filter_map(|r| {
                let row = self.a_matrix.row(r);
                let ok = row.len() == 4 && row.iter().all(|&(_, v)| v == 1.0 || v == -1.0);
                (!ok).then(|| RowViolation {
                    row: r,
                    nonzeros: row.len(),
                    values: row.iter().map(|&(_, v)| v).collect(),
                })
            })
            .collect()
    }

    /// `W·state` for a real state on the full clock ⊗ system space.
    pub fn apply_w(&self, state: &[f64]) -> Result<Vec<f64>> {
        let dim = self.dimension();
        if state.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: state.len(),
            });
        }
        let m = self.clock_size();
        let n = self.system_dim;
        let width = self.width();
        let mut out = vec![0.0; dim];
        for (r, &amp) in state.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            let (l, k) = (r / n, r % n);
            let step = &self.steps[l];
            let scale = 2f64.powf(-f64::from(step.hadamards) / 2.0);
            for (i, c) in step.action(width, k) {
                out[((l + 1) % m) * n + i] += amp * scale * c as f64;
            }
        }
        Ok(out)
    }

    /// Exact phase `c ∈ {+1, −1}` with `W^M|j⟩ = c|j⟩`, if there is one.
    ///
    /// `W^M|0, s⟩ = |0⟩ ⊗ U|s⟩`, evaluated in integer arithmetic.
    pub fn orbit_phase(&self) -> Result<Option<i8>> {
        let width = self.width();
        let mut v: Vec<(usize, i128)> = vec![(self.start_index, 1)];
        let mut total_h = 0u32;
        for step in self.steps.iter() {
            let mut next = Vec::new();
            for &(k, c) in &v {
                for (i, s) in step.action(width, k) {
                    let term = c.checked_mul(i128::from(s)).ok_or(Error::Overflow)?;
                    next.push((i, term));
                }
            }
            merge_terms(&mut next);
            v = next;
            total_h += step.hadamards;
            if total_h >= 120 {
                return Err(Error::Overflow);
            }
        }
        if total_h % 2 == 1 {
            return Ok(None);
        }
        let unit = 1i128 << (total_h / 2);
        Ok(match v.as_slice() {
            [(i, c)] if *i == self.start_index && *c == unit => Some(1),
            [(i, c)] if *i == self.start_index && *c == -unit => Some(-1),
            _ => None,
        })
    }
}
