use serde::Serialize;

use super::{adjacency_matrix, AdjacencyOracle, Permutation};
use crate::linalg::{eig, operator_norm, DenseHermitian, IntMatrix, SparseSymmetricMatrix};
use crate::{Error, Result};

/// A symmetric matrix whose stored entries are all `±1`.
#[derive(Clone, Debug)]
pub struct SignedSparseMatrix {
    matrix: SparseSymmetricMatrix,
}

impl SignedSparseMatrix {
    /// Checks every stored value and the oracle's symmetry.
    pub fn new(matrix: SparseSymmetricMatrix) -> Result<Self> {
        for i in 0..matrix.dimension() {
            if let Some((j, v)) = matrix.row(i).into_iter().find(|&(_, v)| v != 1.0 && v != -1.0) {
                return Err(Error::MalformedRow {
                    row: i,
                    reason: format!("entry ({i}, {j}) = {v} is not ±1"),
                });
            }
        }
        matrix.validate()?;
        Ok(Self { matrix })
    }

    pub fn from_rows(dimension: usize, rows: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|(j, v)| (j, f64::from(v))).collect())
            .collect();
        Self::new(SparseSymmetricMatrix::from_rows(dimension, rows))
    }

    pub fn dimension(&self) -> usize {
        self.matrix.dimension()
    }

    pub fn matrix(&self) -> &SparseSymmetricMatrix {
        &self.matrix
    }

    /// Row `i` as `(column, ±1)` pairs.
    pub fn row(&self, i: usize) -> Vec<(usize, i8)> {
        self.matrix
            .row(i)
            .into_iter()
            .map(|(j, v)| (j, if v > 0.0 { 1 } else { -1 }))
            .collect()
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let n = self.dimension();
        let rows: Vec<Vec<(usize, i8)>> = (0..n).map(|i| self.row(i)).collect();
        IntMatrix::from_fn(n, |i, j| {
            rows[i]
                .iter()
                .find(|&&(c, _)| c == j)
                .map_or(0, |&(_, v)| i128::from(v))
        })
    }

    pub fn to_gadget(&self) -> GadgetGraph {
        GadgetGraph::new(self.clone())
    }
}

/// The 0/1 graph obtained by replacing each `+1` of `A` with the 2×2
/// identity and each `−1` with the bit flip. Vertex `2i + s` stands for sign
/// bit `s` on source index `i`.
#[derive(Clone, Debug)]
pub struct GadgetGraph {
    source: SignedSparseMatrix,
    degree: usize,
}

impl GadgetGraph {
    pub fn new(source: SignedSparseMatrix) -> Self {
        let degree = (0..source.dimension()).map(|i| source.row(i).len()).max().unwrap_or(0);
        Self { source, degree }
    }

    pub fn source(&self) -> &SignedSparseMatrix {
        &self.source
    }

    /// `(q, r) = (2j, 2j + 1)`.
    pub fn pair_of(&self, j: usize) -> (usize, usize) {
        (2 * j, 2 * j + 1)
    }

    /// `σx ⊗ 1`, exchanging every pair.
    pub fn pairing_automorphism(&self) -> Permutation {
        Permutation::pairing(self.vertex_count()).expect("gadget vertex count is even")
    }
}

impl AdjacencyOracle for GadgetGraph {
    fn vertex_count(&self) -> usize {
        2 * self.source.dimension()
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let (i, s) = (v / 2, v % 2);
        let mut out: Vec<usize> = self
            .source
            .row(i)
            .into_iter()
            .map(|(j, a)| if a > 0 { 2 * j + s } else { 2 * j + (1 - s) })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Outcome of [`direct_sum_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectSumReport {
    /// Largest `|2Ã − 2(|φ⁻⟩⟨φ⁻| ⊗ A + |φ⁺⟩⟨φ⁺| ⊗ A∗A)|` entry (exact integers).
    pub max_deviation: i128,
    /// Largest gap between the sorted spectra of `Ã` and of `A ⊕ A∗A`.
    pub spectrum_deviation: f64,
    pub norm_gadget: f64,
    pub norm_a: f64,
    pub norm_a_squared: f64,
}

/// Verifies `Ã = |φ⁻⟩⟨φ⁻| ⊗ A + |φ⁺⟩⟨φ⁺| ⊗ (A∗A)` with `A∗A` the entrywise square.
///
/// In interleaved coordinates the right-hand side doubled is `a + a²` on
/// equal sign bits and `a² − a` on different ones.
pub fn direct_sum_check(a: &SignedSparseMatrix) -> Result<DirectSumReport> {
    let gadget = a.to_gadget();
    let dense_gadget = adjacency_matrix(&gadget)?;
    let ai = a.to_int_matrix();
    let n = a.dimension();
    let mut max_deviation = 0i128;
    for v in 0..2 * n {
        for w in 0..2 * n {
            let x = ai.get(v / 2, w / 2);
            let expected = if v % 2 == w % 2 { x + x * x } else { x * x - x };
            let got = 2 * dense_gadget.re(v, w) as i128;
            max_deviation = max_deviation.max((got - expected).abs());
        }
    }
    let dense_a = a.matrix().materialize()?;
    let a_sq = DenseHermitian::from_real(nalgebra::DMatrix::from_fn(n, n, |i, j| {
        (ai.get(i, j) * ai.get(i, j)) as f64
    }))?;
    let mut combined: Vec<f64> = eig(&dense_a)?.eigenvalues().to_vec();
    combined.extend_from_slice(eig(&a_sq)?.eigenvalues());
    combined.sort_by(f64::total_cmp);
    let gadget_spectrum = eig(&dense_gadget)?;
    let spectrum_deviation = gadget_spectrum
        .eigenvalues()
        .iter()
        .zip(&combined)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(DirectSumReport {
        max_deviation,
        spectrum_deviation,
        norm_gadget: operator_norm(&dense_gadget)?,
        norm_a: operator_norm(&dense_a)?,
        norm_a_squared: operator_norm(&a_sq)?,
    })
}
