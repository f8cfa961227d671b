//! Simulated phase estimation on `V = e^{iB}`, post-processing of outcomes by
//! Lipschitz functions, and the repeated-sampling expectation estimator.

mod distribution;
mod estimate;
mod function;

pub use distribution::{
    bias_bound, exact_outcome_distribution, kernel_distribution, outcome_phase, perturbed_distribution,
    statevector_distribution, BiasBound, OutcomeDistribution, CROSS_CHECK_LIMIT, CROSS_CHECK_TOL,
};
pub use estimate::{
    estimate_expectation, estimate_with_eigensystem, functional_sample, plan_estimate, Estimate, EstimateOptions,
    EstimatePlan, OutcomeSampler, MAX_ANCILLAS, SAMPLE_CHUNK,
};
pub use function::FunctionDescriptor;

use serde::Serialize;

use crate::{Error, Result};

/// Smallest `k` with `2^k ≥ x`, exact at powers of two.
pub(crate) fn ceil_log2(x: f64) -> i32 {
    let mut k = x.log2().ceil() as i32;
    while 2f64.powi(k - 1) >= x {
        k -= 1;
    }
    while 2f64.powi(k) < x {
        k += 1;
    }
    k
}

/// Ancilla count `⌈log₂(1/η)⌉ + ⌈log₂(2 + 1/(2θ))⌉`.
pub fn ancilla_count(theta: f64, eta: f64) -> Result<u32> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("θ = {theta} is outside (0, 1)")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("η = {eta} is outside (0, 1)")));
    }
    let p = ceil_log2(1.0 / eta) + ceil_log2(2.0 + 1.0 / (2.0 * theta));
    Ok(p as u32)
}

/// Phase-estimation parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PEConfig {
    pub theta: f64,
    pub eta: f64,
    pub p: u32,
    pub delta: f64,
    pub repetitions: u64,
    pub alpha: f64,
    pub rng_seed: u64,
}

impl PEConfig {
    /// Resolves `p` from `(θ, η)`; `δ = 0`, one repetition.
    pub fn new(theta: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            theta,
            eta,
            p: ancilla_count(theta, eta)?,
            delta: 0.0,
            repetitions: 1,
            alpha: 0.05,
            rng_seed: 0,
        })
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("δ = {delta} must be finite and ≥ 0")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }
}
