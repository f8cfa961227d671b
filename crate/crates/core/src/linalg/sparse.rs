use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{dense_cap, operator_norm, DenseHermitian};
use crate::error::parse_error;
use crate::{Error, Result};

/// Row oracle: vertex index to sorted `(column, value)` pairs.
pub type RowOracle = Arc<dyn Fn(usize) -> Vec<(usize, f64)> + Send + Sync>;

/// A real symmetric matrix given by a row oracle.
///
/// Nothing is stored beyond the oracle. Structural checks happen when the
/// matrix is materialized.
#[derive(Clone)]
pub struct SparseSymmetricMatrix {
    dimension: usize,
    max_row_nonzeros: usize,
    norm_bound: f64,
    oracle: RowOracle,
}

impl std::fmt::Debug for SparseSymmetricMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseSymmetricMatrix")
            .field("dimension", &self.dimension)
            .field("max_row_nonzeros", &self.max_row_nonzeros)
            .field("norm_bound", &self.norm_bound)
            .finish_non_exhaustive()
    }
}

impl SparseSymmetricMatrix {
    pub fn from_oracle(
        dimension: usize,
        max_row_nonzeros: usize,
        norm_bound: f64,
        oracle: impl Fn(usize) -> Vec<(usize, f64)> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension,
            max_row_nonzeros,
            norm_bound,
            oracle: Arc::new(oracle),
        }
    }

    /// Stores explicit rows verbatim. Malformed rows are only caught by
    /// [`validate`](Self::validate) / [`materialize`](Self::materialize).
    pub fn from_rows(dimension: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let max_row_nonzeros = rows.iter().map(Vec::len).max().unwrap_or(0);
        let norm_bound = rows
            .iter()
            .map(|r| r.iter().map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let rows = Arc::new(rows);
        Self::from_oracle(dimension, max_row_nonzeros, norm_bound, move |i| {
            rows.get(i).cloned().unwrap_or_default()
        })
    }

    /// Builds a matrix from upper-triangle entries `(i, j, v)` with `i ≤ j`.
    pub fn from_upper_entries(dimension: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dimension];
        for (k, &(i, j, v)) in entries.iter().enumerate() {
            if i > j || j >= dimension {
                return Err(Error::MalformedRow {
                    row: i,
                    reason: format!("entry {k} ({i}, {j}) is outside the upper triangle"),
                });
            }
            if v == 0.0 {
                continue;
            }
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::MalformedRow {
                    row: i,
                    reason: "duplicate column index".into(),
                });
            }
        }
        Ok(Self::from_rows(dimension, rows))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_row_nonzeros(&self) -> usize {
        self.max_row_nonzeros
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn with_norm_bound(mut self, norm_bound: f64) -> Self {
        self.norm_bound = norm_bound;
        self
    }

    pub fn row(&self, i: usize) -> Vec<(usize, f64)> {
        (self.oracle)(i)
    }

    /// Value at `(i, j)` as seen from row `i`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.row(i).into_iter().find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    /// Checks row format (sorted, unique, in range, within `s`) and symmetry.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.dimension {
            let row = self.row(i);
            self.check_row_format(i, &row)?;
            for &(j, v) in &row {
                let mirrored = self.row(j).into_iter().find(|&(c, _)| c == i);
                if mirrored.map(|(_, w)| w) != Some(v) {
                    return Err(Error::SymmetryViolation { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    fn check_row_format(&self, i: usize, row: &[(usize, f64)]) -> Result<()> {
        if row.len() > self.max_row_nonzeros {
            return Err(Error::MalformedRow {
                row: i,
                reason: format!(
                    "{} entries exceed the sparsity bound {}",
                    row.len(),
                    self.max_row_nonzeros
                ),
            });
        }
        for w in row.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::MalformedRow {
                    row: i,
                    reason: format!("duplicate column index {}", w[0].0),
                });
            }
            if w[0].0 > w[1].0 {
                return Err(Error::MalformedRow {
                    row: i,
                    reason: "columns are not sorted".into(),
                });
            }
        }
        if let Some(&(j, _)) = row.iter().find(|&&(j, _)| j >= self.dimension) {
            return Err(Error::MalformedRow {
                row: i,
                reason: format!("column {j} out of range"),
            });
        }
        if row.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::MalformedRow {
                row: i,
                reason: "non-finite value".into(),
            });
        }
        Ok(())
    }

    /// Dense copy under the active cap (see [`dense_cap`]).
    pub fn materialize(&self) -> Result<DenseHermitian> {
        self.materialize_with_cap(dense_cap())
    }

    pub fn materialize_with_cap(&self, cap: usize) -> Result<DenseHermitian> {
        if self.dimension > cap {
            return Err(Error::DenseCapExceeded {
                dimension: self.dimension,
                cap,
            });
        }
        let n = self.dimension;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let row = self.row(i);
            self.check_row_format(i, &row)?;
            for (j, v) in row {
                m[(i, j)] = v;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::SymmetryViolation { row: i, col: j });
                }
            }
        }
        DenseHermitian::from_real(m)
    }

    /// Operator norm of the materialized matrix against `norm_bound`.
    pub fn check_norm_bound(&self) -> Result<f64> {
        let norm = operator_norm(&self.materialize()?)?;
        if norm > self.norm_bound * (1.0 + 1e-12) + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "operator norm {norm} exceeds the supplied bound {}",
                self.norm_bound
            )));
        }
        Ok(norm)
    }
}

/// Parses the `symmetric <N>` text format (upper-triangle `i j value` lines).
pub fn read_symmetric(text: &str) -> Result<SparseSymmetricMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(1, "missing `symmetric <N>` header"))?;
    let dimension = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["symmetric", n] => n
            .parse::<usize>()
            .map_err(|e| parse_error(line_no, format!("bad dimension: {e}")))?,
        _ => return Err(parse_error(line_no, "expected `symmetric <N>`")),
    };
    let mut entries = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, j, v] = fields.as_slice() else {
            return Err(parse_error(line_no, "expected `i j value`"));
        };
        let i: usize = i
            .parse()
            .map_err(|e| parse_error(line_no, format!("bad row index: {e}")))?;
        let j: usize = j
            .parse()
            .map_err(|e| parse_error(line_no, format!("bad column index: {e}")))?;
        let v: f64 = v.parse().map_err(|e| parse_error(line_no, format!("bad value: {e}")))?;
        if i > j || j >= dimension {
            return Err(parse_error(
                line_no,
                format!("({i}, {j}) is not an upper-triangle index below {dimension}"),
            ));
        }
        entries.push((i, j, v));
    }
    SparseSymmetricMatrix::from_upper_entries(dimension, &entries)
}

/// Writes the upper triangle in sorted `(i, j)` order.
pub fn write_symmetric(matrix: &SparseSymmetricMatrix) -> Result<String> {
    matrix.validate()?;
    let mut out = format!("symmetric {}\n", matrix.dimension());
    for i in 0..matrix.dimension() {
        for (j, v) in matrix.row(i) {
            if j >= i {
                writeln!(out, "{i} {j} {v}").expect("writing to a String");
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn materializes_small_oracles() {
        let one = SparseSymmetricMatrix::from_rows(1, vec![vec![(0, 1.0)]]);
        assert_eq!(one.materialize().unwrap(), DenseHermitian::identity(1));

        let flip = SparseSymmetricMatrix::from_rows(2, vec![vec![(1, -1.0)], vec![(0, -1.0)]]);
        let dense = flip.materialize().unwrap();
        assert_eq!(dense.re(0, 1), -1.0);
        assert_eq!(dense.re(1, 0), -1.0);
        assert_eq!(dense.re(0, 0), 0.0);
        assert!((flip.check_norm_bound().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_duplicates_and_asymmetry() {
        let dup = SparseSymmetricMatrix::from_rows(2, vec![vec![(1, 1.0), (1, 1.0)], vec![(0, 1.0)]]);
        assert!(matches!(dup.materialize(), Err(Error::MalformedRow { .. })));

        let lopsided = SparseSymmetricMatrix::from_rows(2, vec![vec![(1, 1.0)], vec![]]);
        assert!(matches!(lopsided.materialize(), Err(Error::SymmetryViolation { .. })));
        assert!(lopsided.validate().is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let m = SparseSymmetricMatrix::from_oracle(10, 1, 1.0, |i| vec![(i, 1.0)]);
        assert!(matches!(
            m.materialize_with_cap(5),
            Err(Error::DenseCapExceeded { dimension: 10, cap: 5 })
        ));
    }

    #[test]
    fn text_round_trip() {
        let text = "symmetric 3\n# comment\n0 1 -1\n0 0 2\n1 2 0.5\n";
        let m = read_symmetric(text).unwrap();
        let written = write_symmetric(&m).unwrap();
        assert_eq!(written, "symmetric 3\n0 0 2\n0 1 -1\n1 2 0.5\n");
        let again = read_symmetric(&written).unwrap();
        assert_eq!(m.materialize().unwrap(), again.materialize().unwrap());
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let err = read_symmetric("symmetric 2\n1 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(read_symmetric("graph 2\n").is_err());
        assert!(read_symmetric("symmetric 2\n0 1 1\n0 1 1\n").is_err());
    }
}
