use serde::Serialize;

use super::{check_normalized, Complex64, EigenSystem, DEGENERACY_TOL};
use crate::Result;

/// One support point of a spectral measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

/// Finitely supported probability measure on the real line, sorted by value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
}

/// Outcome of [`SpectralMeasure::compare`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureComparison {
    pub support_matches: bool,
    pub max_value_error: f64,
    pub max_weight_error: f64,
}

impl MeasureComparison {
    pub fn within(&self, value_tol: f64, weight_tol: f64) -> bool {
        self.support_matches && self.max_value_error <= value_tol && self.max_weight_error <= weight_tol
    }
}

impl SpectralMeasure {
    /// Sorts `(value, weight)` pairs and merges values closer than `tolerance`.
    ///
    /// Merged atoms sit at the mean of their members.
    pub fn from_atoms(mut raw: Vec<(f64, f64)>, tolerance: f64) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<Atom> = Vec::new();
        let mut members = 0usize;
        let mut value_sum = 0.0;
        let mut last = f64::NEG_INFINITY;
        for (value, weight) in raw {
            match atoms.last_mut() {
                Some(atom) if value - last <= tolerance => {
                    atom.weight += weight;
                    members += 1;
                    value_sum += value;
                    atom.value = value_sum / members as f64;
                }
                _ => {
                    atoms.push(Atom { value, weight });
                    members = 1;
                    value_sum = value;
                }
            }
            last = value;
        }
        Self { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn values(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.value).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Drops atoms with weight at most `threshold`.
    pub fn pruned(&self, threshold: f64) -> Self {
        Self {
            atoms: self.atoms.iter().copied().filter(|a| a.weight > threshold).collect(),
        }
    }

    /// Multiplies every support value by `factor` (order-preserving for `factor > 0`).
    pub fn scaled(&self, factor: f64) -> Self {
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                value: a.value * factor,
                weight: a.weight,
            })
            .collect();
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        Self { atoms }
    }

    pub fn moment(&self, m: u32) -> f64 {
        self.expectation(|x| x.powi(m as i32))
    }

    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * f(a.value)).sum()
    }

    /// Weight of atoms within `tolerance` of `value`.
    pub fn weight_near(&self, value: f64, tolerance: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.value - value).abs() <= tolerance)
            .map(|a| a.weight)
            .sum()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.atoms.last().map(|a| a.value)
    }

    /// Pairs atoms in sorted order after dropping weights `≤ prune`.
    pub fn compare(&self, other: &Self, prune: f64) -> MeasureComparison {
        let a = self.pruned(prune);
        let b = other.pruned(prune);
        if a.atoms.len() != b.atoms.len() {
            return MeasureComparison {
                support_matches: false,
                max_value_error: f64::INFINITY,
                max_weight_error: f64::INFINITY,
            };
        }
        let mut value_err: f64 = 0.0;
        let mut weight_err: f64 = 0.0;
        for (x, y) in a.atoms.iter().zip(&b.atoms) {
            value_err = value_err.max((x.value - y.value).abs());
            weight_err = weight_err.max((x.weight - y.weight).abs());
        }
        MeasureComparison {
            support_matches: true,
            max_value_error: value_err,
            max_weight_error: weight_err,
        }
    }
}

/// Spectral measure of `psi` with respect to the eigensystem.
///
/// Eigenvalues closer than `1e-8` times the spectral diameter share an atom.
pub fn project_state(es: &EigenSystem, psi: &[Complex64]) -> Result<SpectralMeasure> {
    check_normalized(psi)?;
    let weights = es.weights(psi)?;
    let values = es.eigenvalues();
    let diameter = match (values.first(), values.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    };
    let raw = values.iter().copied().zip(weights).collect();
    Ok(SpectralMeasure::from_atoms(raw, DEGENERACY_TOL * diameter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, complex_vector, eig, DenseHermitian};
    use approx::assert_abs_diff_eq;

    fn flip() -> EigenSystem {
        eig(&DenseHermitian::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap()).unwrap()
    }

    #[test]
    fn basis_state_splits_evenly() {
        let mu = project_state(&flip(), &basis_vector(2, 0)).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        assert_abs_diff_eq!(mu.atoms()[0].value, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.atoms()[0].weight, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.atoms()[1].weight, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn eigenvector_gives_point_mass() {
        let s = 0.5f64.sqrt();
        let mu = project_state(&flip(), &complex_vector(&[s, s])).unwrap();
        let mu = mu.pruned(1e-12);
        assert_eq!(mu.atoms().len(), 1);
        assert_abs_diff_eq!(mu.atoms()[0].value, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.atoms()[0].weight, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_eigenvalues_are_binned() {
        let es = eig(&DenseHermitian::identity(4)).unwrap();
        let mu = project_state(&es, &complex_vector(&[0.5, 0.5, 0.5, 0.5])).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_abs_diff_eq!(mu.total_mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_normalized_state_rejected() {
        assert!(project_state(&flip(), &complex_vector(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn comparison_after_pruning() {
        let a = SpectralMeasure::from_atoms(vec![(0.0, 0.5), (1.0, 0.5), (2.0, 0.0)], 1e-9);
        let b = SpectralMeasure::from_atoms(vec![(1.0 + 1e-10, 0.5), (0.0, 0.5)], 1e-9);
        assert!(a.compare(&b, 1e-12).within(1e-9, 1e-12));
        let c = SpectralMeasure::from_atoms(vec![(0.0, 1.0)], 1e-9);
        assert!(!a.compare(&c, 1e-12).support_matches);
        assert_abs_diff_eq!(a.moment(2), 0.5, epsilon = 1e-15);
    }
}
