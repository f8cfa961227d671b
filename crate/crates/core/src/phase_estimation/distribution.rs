use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{FunctionDescriptor, PEConfig};
use crate::linalg::{check_normalized, eig, matrix_exp_imag, spectral_norm, DenseHermitian, EigenSystem};
use crate::{exec, Error, Result};

/// Largest `2^p·N` for which the statevector route is run alongside the kernel.
pub const CROSS_CHECK_LIMIT: usize = 1 << 16;

/// Required ℓ¹ agreement between the two routes.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Outcome `a ∈ [0, 2^p)` remapped to a phase: `2πa/2^p` for `a ≤ 2^{p−1}`,
/// otherwise shifted down by `2π`.
pub fn outcome_phase(a: usize, p: u32) -> f64 {
    let n = 1usize << p;
    let x = 2.0 * PI * a as f64 / n as f64;
    if 2 * a <= n {
        x
    } else {
        x - 2.0 * PI
    }
}

/// Distribution of phase-estimation outcomes, indexed by the raw register value `a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    p: u32,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    fn new(p: u32, probabilities: Vec<f64>) -> Result<Self> {
        let mass: f64 = probabilities.iter().sum();
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::IdentityFailure(format!("outcome distribution has mass {mass}")));
        }
        Ok(Self { p, probabilities })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, a: usize) -> f64 {
        self.probabilities[a]
    }

    pub fn phase(&self, a: usize) -> f64 {
        outcome_phase(a, self.p)
    }

    /// `(x, probability)` pairs sorted by `x`.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = self
            .probabilities
            .iter()
            .enumerate()
            .map(|(a, &q)| (self.phase(a), q))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.p != other.p {
            return Err(Error::DimensionMismatch {
                expected: self.probabilities.len(),
                found: other.probabilities.len(),
            });
        }
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }

    /// `E f(X)` with outcomes clamped into the domain of `f`.
    pub fn expectation(&self, f: &FunctionDescriptor) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(a, &q)| q * f.eval(self.phase(a)))
            .sum()
    }

    /// Mass within `radius` of `x`, measured on the circle.
    pub fn mass_near(&self, x: f64, radius: f64) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(a, _)| {
                let d = (self.phase(*a) - x).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d) <= radius
            })
            .map(|(_, &q)| q)
            .sum()
    }

    /// `x,probability` lines sorted by `x`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,probability\n");
        for (x, q) in self.support() {
            writeln!(out, "{x},{q}").expect("writing to a String");
        }
        out
    }
}

/// `sin²(n·d/2) / (n² sin²(d/2))`, the squared normalized Dirichlet kernel.
fn fejer(n: f64, d: f64) -> f64 {
    let s = (d / 2.0).sin();
    if s.abs() < 1e-12 {
        return 1.0;
    }
    let num = (n * d / 2.0).sin();
    (num * num) / (n * n * s * s)
}

/// Outcome distribution from the eigendecomposition:
/// `q(a) = Σ_j |c_j|²·|2^{−p} Σ_k e^{ik(λ_j − 2πa/2^p)}|²`.
pub fn kernel_distribution(es: &EigenSystem, psi: &[Complex64], p: u32) -> Result<OutcomeDistribution> {
    let weights = es.weights(psi)?;
    let n = 1usize << p;
    let nf = n as f64;
    let terms: Vec<(f64, f64)> = es
        .eigenvalues()
        .iter()
        .copied()
        .zip(weights)
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let probabilities = exec::map_range(n, |a| {
        let grid = 2.0 * PI * a as f64 / nf;
        terms.iter().map(|&(l, w)| w * fejer(nf, l - grid)).sum()
    });
    OutcomeDistribution::new(p, probabilities)
}

/// Outcome distribution from a full statevector run of the textbook circuit:
/// Hadamards on the `p` ancillas, controlled `V^{2^k}` on ancilla bit `k`,
/// then the gate-level inverse QFT.
pub fn statevector_distribution(
    unitary: &DMatrix<Complex64>,
    psi: &[Complex64],
    p: u32,
) -> Result<OutcomeDistribution> {
    check_normalized(psi)?;
    let dim = unitary.nrows();
    if psi.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: psi.len(),
        });
    }
    let n = 1usize << p;
    // Register layout: amp[a·dim + s].
    let mut amp = vec![Complex64::new(0.0, 0.0); n * dim];
    let h = 1.0 / (n as f64).sqrt();
    for a in 0..n {
        for s in 0..dim {
            amp[a * dim + s] = psi[s] * h;
        }
    }
    let mut power = unitary.clone();
    for k in 0..p {
        let bit = 1usize << k;
        for block in amp
            .chunks_mut(dim)
            .enumerate()
            .filter(|(a, _)| a & bit != 0)
            .map(|(_, b)| b)
        {
            let v = nalgebra::DVector::from_column_slice(block);
            let w = &power * v;
            block.copy_from_slice(w.as_slice());
        }
        power = &power * &power;
    }
    inverse_qft(&mut amp, p, dim);
    let probabilities = (0..n)
        .map(|a| amp[a * dim..(a + 1) * dim].iter().map(|c| c.norm_sqr()).sum())
        .collect();
    OutcomeDistribution::new(p, probabilities)
}

/// Gate-level inverse QFT on the ancilla index. Ancilla `i` (1-based, most
/// significant first) is bit `p − i` of `a`.
fn inverse_qft(amp: &mut [Complex64], p: u32, dim: usize) {
    let n = 1usize << p;
    let bit = |i: u32| 1usize << (p - i);
    // Swaps first.
    for i in 1..=p / 2 {
        let (x, y) = (bit(i), bit(p + 1 - i));
        for a in 0..n {
            if a & x != 0 && a & y == 0 {
                let b = (a & !x) | y;
                for s in 0..dim {
                    amp.swap(a * dim + s, b * dim + s);
                }
            }
        }
    }
    for i in (1..=p).rev() {
        for k in (2..=(p - i + 1)).rev() {
            let control = bit(i + k - 1);
            let target = bit(i);
            let phase = Complex64::from_polar(1.0, -2.0 * PI / 2f64.powi(k as i32));
            for a in 0..n {
                if a & control != 0 && a & target != 0 {
                    for s in 0..dim {
                        amp[a * dim + s] *= phase;
                    }
                }
            }
        }
        let t = bit(i);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for a in 0..n {
            if a & t == 0 {
                let b = a | t;
                for s in 0..dim {
                    let x = amp[a * dim + s];
                    let y = amp[b * dim + s];
                    amp[a * dim + s] = (x + y) * r;
                    amp[b * dim + s] = (x - y) * r;
                }
            }
        }
    }
}

pub(crate) fn check_spectrum(es: &EigenSystem) -> Result<()> {
    let bad = es.eigenvalues().iter().find(|l| l.abs() > PI + 1e-12);
    match bad {
        Some(l) => Err(Error::InvalidParameter(format!(
            "eigenvalue {l} lies outside [−π, π]; rescale the observable"
        ))),
        None => Ok(()),
    }
}

/// Kernel-route distribution for `V = e^{iB}` without the statevector cross-check.
pub(crate) fn kernel_for(b_obs: &DenseHermitian, psi: &[Complex64], p: u32) -> Result<OutcomeDistribution> {
    check_normalized(psi)?;
    let es = eig(b_obs)?;
    check_spectrum(&es)?;
    kernel_distribution(&es, psi, p)
}

/// Exact outcome distribution for `V = e^{iB}` on `psi`.
///
/// The kernel route is always computed; when `2^p·N ≤ CROSS_CHECK_LIMIT` the
/// statevector route is run too and the two must agree in ℓ¹.
pub fn exact_outcome_distribution(
    b_obs: &DenseHermitian,
    psi: &[Complex64],
    cfg: &PEConfig,
) -> Result<OutcomeDistribution> {
    check_normalized(psi)?;
    let es = eig(b_obs)?;
    check_spectrum(&es)?;
    let kernel = kernel_distribution(&es, psi, cfg.p)?;
    if (1usize << cfg.p) * b_obs.dimension() <= CROSS_CHECK_LIMIT {
        let v = es.reconstruct_complex(|l| Complex64::from_polar(1.0, l));
        let direct = statevector_distribution(&v, psi, cfg.p)?;
        let gap = kernel.l1_distance(&direct)?;
        if gap > CROSS_CHECK_TOL {
            return Err(Error::IdentityFailure(format!(
                "kernel and statevector outcome distributions differ by {gap} in ℓ¹"
            )));
        }
    }
    Ok(kernel)
}

/// Outcome distribution when `e^{i(B + P)}` replaces `e^{iB}`; requires
/// `‖e^{i(B+P)} − e^{iB}‖ ≤ δ`.
pub fn perturbed_distribution(
    b_obs: &DenseHermitian,
    psi: &[Complex64],
    cfg: &PEConfig,
    perturbation: &DenseHermitian,
) -> Result<OutcomeDistribution> {
    let shifted = b_obs.add(perturbation)?;
    let v = matrix_exp_imag(b_obs, 1.0)?;
    let u = matrix_exp_imag(&shifted, 1.0)?;
    let distance = spectral_norm(&(&u - &v));
    if distance > cfg.delta {
        return Err(Error::PerturbationTooLarge {
            distance,
            delta: cfg.delta,
        });
    }
    check_normalized(psi)?;
    let es = eig(&shifted)?;
    kernel_distribution(&es, psi, cfg.p)
}

/// Bias bound on `|E f(X) − ⟨ψ|f(B)|ψ⟩|` with both δ coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasBound {
    /// `(2θ + 2^{p+2}δ)‖f‖∞ + 2πKη`.
    pub wide: f64,
    /// `(2θ + 2^{p+1}δ)‖f‖∞ + 2πKη`.
    pub narrow: f64,
}

pub fn bias_bound(cfg: &PEConfig, f: &FunctionDescriptor) -> BiasBound {
    let two_p = 2f64.powi(cfg.p as i32);
    let tail = 2.0 * PI * f.lipschitz() * cfg.eta;
    BiasBound {
        wide: (2.0 * cfg.theta + 4.0 * two_p * cfg.delta) * f.sup_norm() + tail,
        narrow: (2.0 * cfg.theta + 2.0 * two_p * cfg.delta) * f.sup_norm() + tail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, complex_vector};
    use approx::assert_abs_diff_eq;

    fn cfg(p: u32) -> PEConfig {
        PEConfig {
            theta: 0.1,
            eta: 0.1,
            p,
            delta: 0.0,
            repetitions: 1,
            alpha: 0.05,
            rng_seed: 0,
        }
    }

    #[test]
    fn remap() {
        assert_eq!(outcome_phase(0, 3), 0.0);
        assert_abs_diff_eq!(outcome_phase(4, 3), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(outcome_phase(5, 3), -3.0 * PI / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_observable_gives_point_mass_at_zero() {
        let d = exact_outcome_distribution(&DenseHermitian::zeros(2), &basis_vector(2, 1), &cfg(4)).unwrap();
        assert_abs_diff_eq!(d.probability(0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_eigenphase_is_exact() {
        let p = 5;
        for a0 in [1usize, 7, 16, 20, 31] {
            let lambda = outcome_phase(a0, p);
            let b = DenseHermitian::from_rows(&[vec![lambda, 0.0], vec![0.0, 0.3]]).unwrap();
            let d = exact_outcome_distribution(&b, &basis_vector(2, 0), &cfg(p)).unwrap();
            assert_abs_diff_eq!(d.probability(a0), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn routes_agree_on_a_mixed_state() {
        let b =
            DenseHermitian::from_rows(&[vec![0.3, 0.2, -0.1], vec![0.2, -0.5, 0.25], vec![-0.1, 0.25, 0.6]]).unwrap();
        let psi = complex_vector(&[0.6, 0.0, 0.8]);
        let es = eig(&b).unwrap();
        let v = matrix_exp_imag(&b, 1.0).unwrap();
        for p in 1..=7 {
            let k = kernel_distribution(&es, &psi, p).unwrap();
            let s = statevector_distribution(&v, &psi, p).unwrap();
            assert!(k.l1_distance(&s).unwrap() < 1e-10, "p = {p}");
        }
    }

    #[test]
    fn inverse_qft_matches_dft() {
        let p = 3;
        let n = 8;
        for y in 0..n {
            // QFT|y⟩, then QFT† must give |y⟩ back.
            let mut amp: Vec<Complex64> = (0..n)
                .map(|a| Complex64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (a * y) as f64 / n as f64))
                .collect();
            inverse_qft(&mut amp, p, 1);
            for (a, c) in amp.iter().enumerate() {
                let expected = if a == y { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(c.norm(), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn perturbation_checks() {
        let b = DenseHermitian::from_rows(&[vec![0.2, 0.1], vec![0.1, -0.4]]).unwrap();
        let psi = complex_vector(&[0.6, 0.8]);
        let base = exact_outcome_distribution(&b, &psi, &cfg(4)).unwrap();
        let same = perturbed_distribution(&b, &psi, &cfg(4), &DenseHermitian::zeros(2)).unwrap();
        assert!(base.l1_distance(&same).unwrap() < 1e-12);

        let pert = DenseHermitian::from_rows(&[vec![0.0, 1e-3], vec![1e-3, 0.0]]).unwrap();
        assert!(matches!(
            perturbed_distribution(&b, &psi, &cfg(4), &pert),
            Err(Error::PerturbationTooLarge { .. })
        ));
        let loose = cfg(4).with_delta(2e-3).unwrap();
        let moved = perturbed_distribution(&b, &psi, &loose, &pert).unwrap();
        let bound = 2f64.powi(6) * loose.delta;
        assert!(base.l1_distance(&moved).unwrap() <= bound);
    }

    #[test]
    fn csv_is_sorted_by_phase() {
        let d = exact_outcome_distribution(&DenseHermitian::zeros(1), &basis_vector(1, 0), &cfg(2)).unwrap();
        let csv = d.to_csv();
        let xs: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(xs.len(), 4);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn out_of_range_spectrum_rejected() {
        let b = DenseHermitian::identity(1).scaled(4.0);
        assert!(exact_outcome_distribution(&b, &basis_vector(1, 0), &cfg(3)).is_err());
    }
}
