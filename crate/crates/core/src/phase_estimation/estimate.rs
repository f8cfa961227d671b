use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::distribution::{check_spectrum, kernel_for};
use super::{
    ancilla_count, bias_bound, kernel_distribution, perturbed_distribution, BiasBound, FunctionDescriptor,
    OutcomeDistribution, PEConfig,
};
use crate::linalg::{check_normalized, DenseHermitian, EigenSystem};
use crate::{exec, Error, Result};

/// Samples per independently seeded chunk.
pub const SAMPLE_CHUNK: u64 = 4096;

/// Largest ancilla register the estimator will simulate.
pub const MAX_ANCILLAS: u32 = 22;

/// Inverse-CDF sampler over raw outcomes.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    p: u32,
    cdf: Vec<f64>,
}

impl OutcomeSampler {
    pub fn new(dist: &OutcomeDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .probabilities()
            .iter()
            .map(|q| {
                acc += q;
                acc
            })
            .collect();
        Self { p: dist.p(), cdf }
    }

    pub fn sample_index(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cdf.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }

    /// A remapped phase `x`.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        super::outcome_phase(self.sample_index(rng), self.p)
    }
}

/// One draw of `f(clamp(x))` with `x` distributed as `dist`.
pub fn functional_sample(dist: &OutcomeDistribution, f: &FunctionDescriptor, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    f.eval(OutcomeSampler::new(dist).sample(&mut rng))
}

/// Resolved parameters of one estimator run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatePlan {
    pub epsilon: f64,
    pub alpha: f64,
    pub theta: f64,
    pub eta: f64,
    pub p: u32,
    pub delta: f64,
    pub sup_norm: f64,
    pub lipschitz: f64,
    /// `ε·(‖f‖∞ + K)`.
    pub error_budget: f64,
    pub bias_bound: BiasBound,
    /// `ε' = ε·(‖f‖∞ + K)/3`, the Hoeffding half-width.
    pub sampling_error: f64,
    pub repetitions: u64,
    pub repetitions_overridden: bool,
}

impl EstimatePlan {
    pub fn config(&self, seed: u64) -> PEConfig {
        PEConfig {
            theta: self.theta,
            eta: self.eta,
            p: self.p,
            delta: self.delta,
            repetitions: self.repetitions,
            alpha: self.alpha,
            rng_seed: seed,
        }
    }
}

/// `η = ε/(6π)`, `θ = ε/6`, `p` from those, `δ·2^{p+2} ≤ ε/3`, and the
/// two-sided Hoeffding count `n = ⌈(R²/(2ε'²))·ln(2/α)⌉` with `R = 2‖f‖∞`.
pub fn plan_estimate(
    f: &FunctionDescriptor,
    epsilon: f64,
    alpha: f64,
    delta: f64,
    repetitions_override: Option<u64>,
) -> Result<EstimatePlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} is outside (0, 1)")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("α = {alpha} is outside (0, 1)")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("δ = {delta} must be finite and ≥ 0")));
    }
    let eta = epsilon / (6.0 * PI);
    let theta = epsilon / 6.0;
    let p = ancilla_count(theta, eta)?;
    if p > MAX_ANCILLAS {
        return Err(Error::BudgetInfeasible(format!(
            "ε = {epsilon} needs {p} ancillas, above the simulation limit {MAX_ANCILLAS}"
        )));
    }
    if delta * 2f64.powi(p as i32 + 2) > epsilon / 3.0 {
        return Err(Error::BudgetInfeasible(format!(
            "δ·2^(p+2) = {} exceeds ε/3 = {}",
            delta * 2f64.powi(p as i32 + 2),
            epsilon / 3.0
        )));
    }
    let error_budget = epsilon * (f.sup_norm() + f.lipschitz());
    let sampling_error = error_budget / 3.0;
    let range = 2.0 * f.sup_norm();
    let hoeffding = if range == 0.0 {
        1
    } else {
        let n = (range * range / (2.0 * sampling_error * sampling_error) * (2.0 / alpha).ln()).ceil();
        if !n.is_finite() || n > 1e12 {
            return Err(Error::BudgetInfeasible(format!("{n} repetitions requested")));
        }
        (n as u64).max(1)
    };
    let repetitions = repetitions_override.unwrap_or(hoeffding);
    if repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be positive".into()));
    }
    let mut plan = EstimatePlan {
        epsilon,
        alpha,
        theta,
        eta,
        p,
        delta,
        sup_norm: f.sup_norm(),
        lipschitz: f.lipschitz(),
        error_budget,
        bias_bound: BiasBound { wide: 0.0, narrow: 0.0 },
        sampling_error,
        repetitions,
        repetitions_overridden: repetitions_override.is_some(),
    };
    plan.bias_bound = bias_bound(&plan.config(0), f);
    Ok(plan)
}

/// Knobs of [`estimate_expectation`].
#[derive(Clone, Debug)]
pub struct EstimateOptions {
    pub epsilon: f64,
    pub alpha: f64,
    pub delta: f64,
    pub seed: u64,
    pub repetitions_override: Option<u64>,
    /// Realizes the δ-approximate unitary as `e^{i(B + P)}`.
    pub perturbation: Option<DenseHermitian>,
}

impl EstimateOptions {
    pub fn new(epsilon: f64, alpha: f64) -> Self {
        Self {
            epsilon,
            alpha,
            delta: 0.0,
            seed: 0,
            repetitions_override: None,
            perturbation: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Result of [`estimate_expectation`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub sample_count: u64,
    /// `E f(X)` under the sampled distribution, without sampling noise.
    pub distribution_mean: f64,
    pub plan: EstimatePlan,
}

/// Estimates `⟨ψ|f(B)|ψ⟩` by sampling post-processed phase-estimation outcomes.
///
/// Samples are drawn in chunks of [`SAMPLE_CHUNK`]; chunk `c` uses a ChaCha8
/// generator seeded with `seed` on stream `c`. Chunk sums are added in chunk
/// order, so the estimate does not depend on the thread count.
pub fn estimate_expectation(
    b_obs: &DenseHermitian,
    psi: &[Complex64],
    f: &FunctionDescriptor,
    opts: &EstimateOptions,
) -> Result<Estimate> {
    let plan = plan_estimate(f, opts.epsilon, opts.alpha, opts.delta, opts.repetitions_override)?;
    let dist = match &opts.perturbation {
        Some(pert) => perturbed_distribution(b_obs, psi, &plan.config(opts.seed), pert)?,
        None => kernel_for(b_obs, psi, plan.p)?,
    };
    Ok(sample_mean(&dist, f, plan, opts.seed))
}

/// [`estimate_expectation`] for an observable whose eigensystem is already
/// known; no perturbation is applied.
pub fn estimate_with_eigensystem(
    es: &EigenSystem,
    psi: &[Complex64],
    f: &FunctionDescriptor,
    opts: &EstimateOptions,
) -> Result<Estimate> {
    if opts.perturbation.is_some() {
        return Err(Error::InvalidParameter(
            "perturbations need the observable, not its eigensystem".into(),
        ));
    }
    let plan = plan_estimate(f, opts.epsilon, opts.alpha, opts.delta, opts.repetitions_override)?;
    check_normalized(psi)?;
    check_spectrum(es)?;
    let dist = kernel_distribution(es, psi, plan.p)?;
    Ok(sample_mean(&dist, f, plan, opts.seed))
}

fn sample_mean(dist: &OutcomeDistribution, f: &FunctionDescriptor, plan: EstimatePlan, seed: u64) -> Estimate {
    let sampler = OutcomeSampler::new(dist);
    let n = plan.repetitions;
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let sums = exec::map_range(chunks as usize, |c| {
        let c = c as u64;
        let count = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        (0..count).map(|_| f.eval(sampler.sample(&mut rng))).sum::<f64>()
    });
    let total: f64 = sums.iter().sum();
    Estimate {
        estimate: total / n as f64,
        sample_count: n,
        distribution_mean: dist.expectation(f),
        plan,
    }
}
