use super::DenseHermitian;
use crate::{exec, Error, Result};

/// Square matrix of exact integers, used for path counting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i128) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| i128::from(i == j))
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.n + j]
    }

    /// Checked product; rows are computed in parallel and zeros of `other`
    /// are skipped, so a sparse right factor is cheap.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let sparse_rows: Vec<Vec<(usize, i128)>> = (0..n)
            .map(|k| {
                (0..n)
                    .filter_map(|j| {
                        let v = other.data[k * n + j];
                        (v != 0).then_some((j, v))
                    })
                    .collect()
            })
            .collect();
        let rows = exec::try_map_range(n, |i| -> Result<Vec<i128>> {
            let mut row = vec![0i128; n];
            for (k, sparse) in sparse_rows.iter().enumerate() {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for &(j, b) in sparse {
                    let prod = a.checked_mul(b).ok_or(Error::Overflow)?;
                    row[j] = row[j].checked_add(prod).ok_or(Error::Overflow)?;
                }
            }
            Ok(row)
        })?;
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Checked `self^m`: repeated right multiplication for small `m` (cheap
    /// when `self` is sparse), repeated squaring otherwise.
    pub fn checked_pow(&self, m: u32) -> Result<Self> {
        if m <= 64 {
            let mut result = Self::identity(self.n);
            for _ in 0..m {
                result = result.checked_mul(self)?;
            }
            return Ok(result);
        }
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Converts to a dense matrix; fails if an entry is not exactly representable.
    pub fn to_dense(&self) -> Result<DenseHermitian> {
        let limit = 1i128 << 53;
        if self.data.iter().any(|v| v.abs() > limit) {
            return Err(Error::Overflow);
        }
        let n = self.n;
        DenseHermitian::from_real(nalgebra::DMatrix::from_fn(n, n, |i, j| self.get(i, j) as f64))
    }
}

/// `h^m` in exact integer arithmetic; `h` must have integer entries.
pub fn matrix_power_exact(h: &DenseHermitian, m: u32) -> Result<IntMatrix> {
    let base = h
        .to_int_matrix()
        .ok_or_else(|| Error::InvalidParameter("exact matrix power needs integer entries".into()))?;
    base.checked_pow(m)
}
