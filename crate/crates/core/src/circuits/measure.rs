use std::f64::consts::PI;

use serde::Serialize;

use super::PhaseMark;
use crate::linalg::{Atom, SpectralMeasure};
use crate::{Error, Result};

/// Closed-form spectral measure of `A = ½(W + W†)` at the start state:
/// `P = (1 − α₁²)·P⁽⁰⁾ + α₁²·P⁽¹⁾`.
///
/// `P⁽⁰⁾` lives on `cos(2πl/M)` (the `W` eigenvalues that are `M`-th roots of
/// +1), `P⁽¹⁾` on `cos(π(2l+1)/M)` (roots of −1). Conjugate roots share a
/// cosine, hence the doubled weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticSpectralMeasure {
    pub clock_size: usize,
    pub alpha1_sq: f64,
    pub support0: Vec<Atom>,
    pub support1: Vec<Atom>,
}

pub fn analytic_measure(m_gates: usize, alpha1_sq: f64) -> Result<AnalyticSpectralMeasure> {
    if m_gates < 3 {
        return Err(Error::InvalidParameter(format!("clock size {m_gates} is below 3")));
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&alpha1_sq) {
        return Err(Error::InvalidParameter(format!("α₁² = {alpha1_sq} is outside [0, 1]")));
    }
    let alpha1_sq = alpha1_sq.clamp(0.0, 1.0);
    let m = m_gates as f64;
    let support0 = (0..=m_gates / 2)
        .map(|l| {
            let single = l == 0 || 2 * l == m_gates;
            Atom {
                value: (2.0 * PI * l as f64 / m).cos(),
                weight: if single { 1.0 / m } else { 2.0 / m },
            }
        })
        .collect();
    let support1 = (0..m_gates.div_ceil(2))
        .map(|l| {
            let single = 2 * l + 1 == m_gates;
            Atom {
                value: (PI * (2 * l + 1) as f64 / m).cos(),
                weight: if single { 1.0 / m } else { 2.0 / m },
            }
        })
        .collect();
    Ok(AnalyticSpectralMeasure {
        clock_size: m_gates,
        alpha1_sq,
        support0,
        support1,
    })
}

/// Measure for a clock built from `U = Y†(±σz)Y`, given `α₁²` of `Y`.
/// With the mark on `|0⟩` the roles of `P⁽⁰⁾` and `P⁽¹⁾` swap.
pub fn clock_measure(m_gates: usize, alpha1_sq: f64, mark: PhaseMark) -> Result<AnalyticSpectralMeasure> {
    match mark {
        PhaseMark::One => analytic_measure(m_gates, alpha1_sq),
        PhaseMark::Zero => analytic_measure(m_gates, 1.0 - alpha1_sq),
    }
}

impl AnalyticSpectralMeasure {
    /// The mixed measure; support points never coincide between the parts.
    pub fn measure(&self) -> SpectralMeasure {
        let a0 = 1.0 - self.alpha1_sq;
        let raw = self
            .support0
            .iter()
            .map(|a| (a.value, a0 * a.weight))
            .chain(self.support1.iter().map(|a| (a.value, self.alpha1_sq * a.weight)))
            .collect();
        SpectralMeasure::from_atoms(raw, 0.0)
    }

    /// Mass of the largest support value `1`: `(1 − α₁²)/M`.
    pub fn top_weight(&self) -> f64 {
        (1.0 - self.alpha1_sq) / self.clock_size as f64
    }
}

pub fn analytic_moment(measure: &AnalyticSpectralMeasure, m: u32) -> f64 {
    measure.measure().moment(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn three_step_measures() {
        let p = analytic_measure(3, 0.0).unwrap().measure().pruned(0.0);
        assert_eq!(p.atoms().len(), 2);
        assert_abs_diff_eq!(p.atoms()[0].value, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.atoms()[0].weight, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.atoms()[1].value, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.atoms()[1].weight, 1.0 / 3.0, epsilon = 1e-15);

        let p = analytic_measure(3, 1.0).unwrap().measure().pruned(0.0);
        assert_abs_diff_eq!(p.atoms()[0].value, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.atoms()[0].weight, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.atoms()[1].value, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.atoms()[1].weight, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn three_step_moments() {
        let zero = analytic_measure(3, 0.0).unwrap();
        assert_abs_diff_eq!(analytic_moment(&zero, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(analytic_moment(&zero, 2), 0.5, epsilon = 1e-15);
        let one = analytic_measure(3, 1.0).unwrap();
        assert_abs_diff_eq!(analytic_moment(&one, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn odd_reflection() {
        for m in [3, 5, 7, 9, 15] {
            let p = analytic_measure(m, 0.3).unwrap();
            let mut reflected: Vec<(f64, f64)> = p.support0.iter().map(|a| (-a.value, a.weight)).collect();
            reflected.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut p1: Vec<(f64, f64)> = p.support1.iter().map(|a| (a.value, a.weight)).collect();
            p1.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (a, b) in reflected.iter().zip(&p1) {
                assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-14);
                assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mark_swaps_parts() {
        let a = clock_measure(5, 0.2, PhaseMark::Zero).unwrap();
        let b = analytic_measure(5, 0.8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_inputs() {
        assert!(analytic_measure(2, 0.5).is_err());
        assert!(analytic_measure(5, 1.5).is_err());
    }

    proptest::proptest! {
        #[test]
        fn total_mass_is_one(m in 3usize..40, a in 0.0f64..=1.0) {
            let p = analytic_measure(m, a).unwrap();
            let parts: f64 = p.support0.iter().chain(&p.support1).map(|x| x.weight).sum();
            proptest::prop_assert!((parts - 2.0).abs() < 1e-12);
            proptest::prop_assert!((p.measure().total_mass() - 1.0).abs() < 1e-12);
        }
    }
}
