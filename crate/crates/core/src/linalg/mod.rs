//! Numerical backbone: sparse symmetric oracles, dense Hermitian matrices and
//! their eigendecompositions, exact integer powers and spectral measures.
//!
//! Everything here is deliberately brute force. The other modules build
//! structured objects lazily; this module materializes them at desk scale and
//! answers spectral questions exactly (up to floating point) so the structured
//! claims can be checked.

mod dense;
mod exact;
mod sparse;
mod spectral;

pub use dense::{
    eig, matrix_exp, matrix_exp_imag, matrix_power, operator_norm, spectral_norm, DenseHermitian, EigenSystem,
};
pub use exact::{matrix_power_exact, IntMatrix};
pub use sparse::{read_symmetric, write_symmetric, RowOracle, SparseSymmetricMatrix};
pub use spectral::{project_state, Atom, MeasureComparison, SpectralMeasure};

pub use num_complex::Complex64;

/// Default cap on materialized dimensions.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Environment variable overriding [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "SPECWALK_DENSE_CAP";

/// Hermiticity tolerance (absolute, per entry).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Tolerance on `‖psi‖ = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Relative tolerance (w.r.t. the spectral diameter) used to bin eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// The active materialization cap.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

/// Lifts a real vector into a complex one.
pub fn complex_vector(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Standard basis vector `e_index` of the given dimension.
pub fn basis_vector(dimension: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dimension];
    v[index] = Complex64::new(1.0, 0.0);
    v
}

/// Fails unless `‖psi‖ = 1` within [`NORMALIZATION_TOL`].
pub fn check_normalized(psi: &[Complex64]) -> crate::Result<()> {
    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(crate::Error::NotNormalized { norm });
    }
    Ok(())
}
