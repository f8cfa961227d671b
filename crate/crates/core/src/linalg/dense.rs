use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_normalized, HERMITIAN_TOL};
use crate::linalg::exact::{matrix_power_exact, IntMatrix};
use crate::{Error, Result};

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// A dense Hermitian matrix.
///
/// Real symmetric inputs are stored as real matrices so the eigensolver and
/// products take the cheaper real path; the semantics are always complex.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHermitian {
    storage: Storage,
}

impl DenseHermitian {
    /// Wraps a complex matrix after checking Hermiticity entrywise.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let n = entries.nrows();
        for i in 0..n {
            for j in i..n {
                let deviation = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if deviation > HERMITIAN_TOL {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        if entries.iter().all(|c| c.im == 0.0) {
            return Ok(Self {
                storage: Storage::Real(entries.map(|c| c.re)),
            });
        }
        Ok(Self {
            storage: Storage::Complex(entries),
        })
    }

    /// Wraps a real symmetric matrix after checking symmetry entrywise.
    pub fn from_real(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let n = entries.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let deviation = (entries[(i, j)] - entries[(j, i)]).abs();
                if deviation > HERMITIAN_TOL {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self {
            storage: Storage::Real(entries),
        })
    }

    /// Row-major real entries; panics on a non-square slice.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("rows must form a square matrix".into()));
        }
        Self::from_real(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            storage: Storage::Real(DMatrix::identity(n, n)),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            storage: Storage::Real(DMatrix::zeros(n, n)),
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.storage {
            Storage::Real(m) => m.nrows(),
            Storage::Complex(m) => m.nrows(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match &self.storage {
            Storage::Real(m) => Complex64::new(m[(i, j)], 0.0),
            Storage::Complex(m) => m[(i, j)],
        }
    }

    /// Real part of entry `(i, j)`.
    pub fn re(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).re
    }

    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match &self.storage {
            Storage::Real(m) => Some(m),
            Storage::Complex(_) => None,
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match &self.storage {
            Storage::Real(m) => m.map(|v| Complex64::new(v, 0.0)),
            Storage::Complex(m) => m.clone(),
        }
    }

    /// True when every entry is a real integer representable exactly in f64.
    pub fn has_integer_entries(&self) -> bool {
        match &self.storage {
            Storage::Real(m) => m.iter().all(|v| v.fract() == 0.0 && v.abs() <= (1u64 << 53) as f64),
            Storage::Complex(_) => false,
        }
    }

    /// Integer view of the matrix, when [`has_integer_entries`](Self::has_integer_entries) holds.
    pub fn to_int_matrix(&self) -> Option<IntMatrix> {
        if !self.has_integer_entries() {
            return None;
        }
        let m = self.as_real()?;
        let n = m.nrows();
        Some(IntMatrix::from_fn(n, |i, j| m[(i, j)] as i128))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match &self.storage {
            Storage::Real(m) => Self {
                storage: Storage::Real(m * factor),
            },
            Storage::Complex(m) => Self {
                storage: Storage::Complex(m * Complex64::new(factor, 0.0)),
            },
        }
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        Ok(match (&self.storage, &other.storage) {
            (Storage::Real(a), Storage::Real(b)) => Self {
                storage: Storage::Real(a + b),
            },
            _ => Self {
                storage: Storage::Complex(self.to_complex() + other.to_complex()),
            },
        })
    }

    /// `d·I − self`.
    pub fn shifted_negation(&self, d: f64) -> Self {
        let n = self.dimension();
        match &self.storage {
            Storage::Real(m) => Self {
                storage: Storage::Real(DMatrix::identity(n, n) * d - m),
            },
            Storage::Complex(m) => Self {
                storage: Storage::Complex(DMatrix::<Complex64>::identity(n, n) * Complex64::new(d, 0.0) - m),
            },
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dimension();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    /// `⟨u|self|v⟩`.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let hv = self.apply(v);
        u.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Maximum absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.dimension();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        worst
    }

    /// Row sums of the real part.
    pub fn row_sums(&self) -> Vec<f64> {
        let n = self.dimension();
        (0..n).map(|i| (0..n).map(|j| self.re(i, j)).sum()).collect()
    }

    /// Column sums of the real part.
    pub fn column_sums(&self) -> Vec<f64> {
        let n = self.dimension();
        (0..n).map(|j| (0..n).map(|i| self.re(i, j)).sum()).collect()
    }

    /// Largest absolute row sum (a Gershgorin bound on the operator norm).
    pub fn gershgorin_bound(&self) -> f64 {
        let n = self.dimension();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn multiply(&self, other: &Self) -> Storage {
        match (&self.storage, &other.storage) {
            (Storage::Real(a), Storage::Real(b)) => Storage::Real(a * b),
            _ => Storage::Complex(self.to_complex() * other.to_complex()),
        }
    }
}

#[derive(Clone, Debug)]
enum Vectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    vectors: Vectors,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigensystem of `factor·h`; `factor` must be positive to keep the order.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor {factor} must be positive"
            )));
        }
        Ok(Self {
            eigenvalues: self.eigenvalues.iter().map(|l| l * factor).collect(),
            vectors: self.vectors.clone(),
        })
    }

    /// Component `row` of eigenvector `k`.
    pub fn component(&self, row: usize, k: usize) -> Complex64 {
        match &self.vectors {
            Vectors::Real(q) => Complex64::new(q[(row, k)], 0.0),
            Vectors::Complex(q) => q[(row, k)],
        }
    }

    /// Eigenvector matrix `Q` (columns are eigenvectors).
    pub fn eigenvectors(&self) -> DMatrix<Complex64> {
        match &self.vectors {
            Vectors::Real(q) => q.map(|v| Complex64::new(v, 0.0)),
            Vectors::Complex(q) => q.clone(),
        }
    }

    /// Overlaps `⟨Q_k|psi⟩` for every eigenvector.
    pub fn coefficients(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dimension();
        if psi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.len(),
            });
        }
        Ok(match &self.vectors {
            Vectors::Real(q) => (0..n).map(|k| (0..n).map(|i| psi[i] * q[(i, k)]).sum()).collect(),
            Vectors::Complex(q) => (0..n)
                .map(|k| (0..n).map(|i| q[(i, k)].conj() * psi[i]).sum())
                .collect(),
        })
    }

    /// Weights `|⟨Q_k|psi⟩|²` for a unit vector `psi`.
    pub fn weights(&self, psi: &[Complex64]) -> Result<Vec<f64>> {
        check_normalized(psi)?;
        Ok(self.coefficients(psi)?.into_iter().map(|c| c.norm_sqr()).collect())
    }

    /// `Q·diag(f(λ))·Q†` for a real function `f`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> DenseHermitian {
        let d: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        match &self.vectors {
            Vectors::Real(q) => {
                let mut scaled = q.clone();
                for (k, mut col) in scaled.column_iter_mut().enumerate() {
                    col *= d[k];
                }
                let m = &scaled * q.transpose();
                DenseHermitian {
                    storage: Storage::Real(symmetrize_real(m)),
                }
            }
            Vectors::Complex(q) => {
                let mut scaled = q.clone();
                for (k, mut col) in scaled.column_iter_mut().enumerate() {
                    col *= Complex64::new(d[k], 0.0);
                }
                let m = &scaled * q.adjoint();
                let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
                DenseHermitian {
                    storage: Storage::Complex(m),
                }
            }
        }
    }

    /// `Q·diag(f(λ))·Q†` for a complex function `f` (e.g. `e^{iλ}`).
    pub fn reconstruct_complex(&self, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let q = self.eigenvectors();
        let mut scaled = q.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        &scaled * q.adjoint()
    }

    /// Frobenius residuals `(‖A − QΛQ†‖, ‖Q†Q − I‖)`.
    pub fn residuals(&self, h: &DenseHermitian) -> (f64, f64) {
        let rebuilt = self.reconstruct(|l| l);
        let n = self.dimension();
        let mut recon = 0.0;
        for i in 0..n {
            for j in 0..n {
                recon += (rebuilt.get(i, j) - h.get(i, j)).norm_sqr();
            }
        }
        let q = self.eigenvectors();
        let gram = q.adjoint() * &q - DMatrix::<Complex64>::identity(n, n);
        let ortho = gram.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        (recon.sqrt(), ortho)
    }
}

fn symmetrize_real(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Eigendecomposition with ascending eigenvalues.
pub fn eig(h: &DenseHermitian) -> Result<EigenSystem> {
    let n = h.dimension();
    if n == 0 {
        return Ok(EigenSystem {
            eigenvalues: Vec::new(),
            vectors: Vectors::Real(DMatrix::zeros(0, 0)),
        });
    }
    match &h.storage {
        Storage::Real(m) => {
            let se = m
                .clone()
                .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
                .ok_or(Error::EigenConvergence)?;
            let order = ascending_order(se.eigenvalues.as_slice());
            let eigenvalues = order.iter().map(|&k| se.eigenvalues[k]).collect();
            let vectors = DMatrix::from_fn(n, n, |i, k| se.eigenvectors[(i, order[k])]);
            Ok(EigenSystem {
                eigenvalues,
                vectors: Vectors::Real(vectors),
            })
        }
        Storage::Complex(m) => {
            let se = m
                .clone()
                .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
                .ok_or(Error::EigenConvergence)?;
            let order = ascending_order(se.eigenvalues.as_slice());
            let eigenvalues = order.iter().map(|&k| se.eigenvalues[k]).collect();
            let vectors = DMatrix::from_fn(n, n, |i, k| se.eigenvectors[(i, order[k])]);
            Ok(EigenSystem {
                eigenvalues,
                vectors: Vectors::Complex(vectors),
            })
        }
    }
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Operator (spectral) norm of a Hermitian matrix.
pub fn operator_norm(h: &DenseHermitian) -> Result<f64> {
    let es = eig(h)?;
    Ok(es.eigenvalues().iter().fold(0.0_f64, |acc, l| acc.max(l.abs())))
}

/// `h^m`, exact when every entry of `h` is an integer.
pub fn matrix_power(h: &DenseHermitian, m: u32) -> Result<DenseHermitian> {
    if h.has_integer_entries() {
        let exact = matrix_power_exact(h, m)?;
        return exact.to_dense();
    }
    let n = h.dimension();
    let mut result = DenseHermitian::identity(n);
    let mut base = h.clone();
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            result = DenseHermitian {
                storage: result.multiply(&base),
            };
        }
        e >>= 1;
        if e > 0 {
            base = DenseHermitian {
                storage: base.multiply(&base),
            };
        }
    }
    Ok(result)
}

/// `exp(scale·h)` via the eigendecomposition (real mode, e.g. `e^{−Lt}`).
pub fn matrix_exp(h: &DenseHermitian, scale: f64) -> Result<DenseHermitian> {
    if !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("scale {scale} is not finite")));
    }
    let es = eig(h)?;
    Ok(es.reconstruct(|l| (scale * l).exp()))
}

/// `exp(i·scale·h)` via the eigendecomposition (unitary mode).
pub fn matrix_exp_imag(h: &DenseHermitian, scale: f64) -> Result<DMatrix<Complex64>> {
    if !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("scale {scale} is not finite")));
    }
    let es = eig(h)?;
    Ok(es.reconstruct_complex(|l| Complex64::from_polar(1.0, scale * l)))
}

/// Spectral norm of an arbitrary square complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let h = DenseHermitian {
        storage: Storage::Complex(gram),
    };
    operator_norm(&h).map(|v| v.max(0.0).sqrt()).unwrap_or(f64::NAN)
}
