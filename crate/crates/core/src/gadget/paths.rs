use std::sync::Arc;

use serde::Serialize;

use super::{adjacency_matrix, find_exchanging_automorphism, AdjacencyOracle, Permutation, SignedSparseMatrix};
use crate::linalg::{complex_vector, operator_norm};
use crate::phase_estimation::{estimate_expectation, EstimateOptions, EstimatePlan, FunctionDescriptor};
use crate::{exec, Error, Method, Result, Verdict};

/// Number of length-`m` walks from `start` to every vertex.
pub fn walk_counts(g: &dyn AdjacencyOracle, start: usize, m: u32) -> Result<Vec<i128>> {
    let n = g.vertex_count();
    if start >= n {
        return Err(Error::InvalidParameter(format!("vertex {start} out of range")));
    }
    let mut w = vec![0i128; n];
    w[start] = 1;
    for _ in 0..m {
        let prev = &w;
        w = exec::try_map_range(n, |v| -> Result<i128> {
            g.neighbors(v)
                .into_iter()
                .try_fold(0i128, |acc, u| acc.checked_add(prev[u]).ok_or(Error::Overflow))
        })?;
    }
    Ok(w)
}

/// `Δ^(m)_qr`: walks of length `m` from `q` back to `q` minus those from `q` to `r`.
pub fn path_difference_exact(g: &dyn AdjacencyOracle, q: usize, r: usize, m: u32) -> Result<i128> {
    if q == r {
        return Err(Error::InvalidParameter("q and r must differ".into()));
    }
    if r >= g.vertex_count() {
        return Err(Error::InvalidParameter(format!("vertex {r} out of range")));
    }
    let w = walk_counts(g, q, m)?;
    w[q].checked_sub(w[r]).ok_or(Error::Overflow)
}

/// `2⟨ψ⁻|Ã^m|ψ⁻⟩` with `ψ⁻ = (|q⟩ − |r⟩)/√2`, next to `2Δ^(m)_qr`.
///
/// The two agree exactly when the walk counts satisfy `(Ã^m)_qq = (Ã^m)_rr`.
pub fn psi_minus_moment(g: &dyn AdjacencyOracle, q: usize, r: usize, m: u32) -> Result<(i128, i128)> {
    let from_q = walk_counts(g, q, m)?;
    let from_r = walk_counts(g, r, m)?;
    let doubled = from_q[q] + from_r[r] - 2 * from_q[r];
    Ok((doubled, 2 * (from_q[q] - from_q[r])))
}

/// Outcome of [`verify_reduction_identity`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    pub j: usize,
    pub q: usize,
    pub r: usize,
    /// `Δ^(n)_qr` for `n = 0..=m`, equal to `(A^n)_jj`.
    pub deltas: Vec<i128>,
    pub norm_a: f64,
    /// `max_{1≤n≤m} |Δ^(n)|^{1/n}`.
    pub max_growth: f64,
}

/// Checks `(A^n)_jj = Δ^(n)_qr` on the gadget for every `n ≤ m`, with
/// `(q, r) = (2j, 2j + 1)`, and the growth bound `|Δ^(n)|^{1/n} ≤ ‖A‖`.
pub fn verify_reduction_identity(a: &SignedSparseMatrix, j: usize, m: u32) -> Result<ReductionReport> {
    if j >= a.dimension() {
        return Err(Error::InvalidParameter(format!("index {j} out of range")));
    }
    let gadget = a.to_gadget();
    let (q, r) = gadget.pair_of(j);
    let base = a.to_int_matrix();
    let norm_a = operator_norm(&a.matrix().materialize()?)?;
    let mut power = crate::linalg::IntMatrix::identity(a.dimension());
    let mut deltas = Vec::with_capacity(m as usize + 1);
    let mut max_growth: f64 = 0.0;
    for n in 0..=m {
        let diagonal = power.get(j, j);
        let delta = path_difference_exact(&gadget, q, r, n)?;
        if diagonal != delta {
            return Err(Error::IdentityFailure(format!(
                "(A^{n})_{j}{j} = {diagonal} but Δ^({n})_{q},{r} = {delta}"
            )));
        }
        if n > 0 {
            let growth = (delta.unsigned_abs() as f64).powf(1.0 / f64::from(n));
            if growth > norm_a + 1e-9 {
                return Err(Error::IdentityFailure(format!(
                    "|Δ^({n})|^(1/{n}) = {growth} exceeds ‖A‖ = {norm_a}"
                )));
            }
            max_growth = max_growth.max(growth);
        }
        deltas.push(delta);
        if n < m {
            power = power.checked_mul(&base)?;
        }
    }
    Ok(ReductionReport {
        j,
        q,
        r,
        deltas,
        norm_a,
        max_growth,
    })
}

/// A "difference of numbers of paths" instance: decide
/// `Δ^(m)_qr ≥ g + εb^m` versus `Δ^(m)_qr ≤ g − εb^m`.
#[derive(Clone)]
pub struct PathDifferenceInstance {
    pub graph: Arc<dyn AdjacencyOracle>,
    pub q: usize,
    pub r: usize,
    pub m: u32,
    pub g: f64,
    pub epsilon: f64,
    /// `b ≥ sup_n |Δ^(n)_qr|^{1/n}`, supplied by the caller.
    pub growth_bound: f64,
    /// Exchanges `q` and `r`; if absent the pairing `v ↔ v ⊕ 1` and the plain
    /// transposition are tried.
    pub automorphism: Option<Permutation>,
}

impl std::fmt::Debug for PathDifferenceInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathDifferenceInstance")
            .field("vertices", &self.graph.vertex_count())
            .field("q", &self.q)
            .field("r", &self.r)
            .field("m", &self.m)
            .field("g", &self.g)
            .field("epsilon", &self.epsilon)
            .field("growth_bound", &self.growth_bound)
            .finish_non_exhaustive()
    }
}

impl PathDifferenceInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.vertex_count();
        if self.q >= n || self.r >= n || self.q == self.r {
            return Err(Error::InvalidParameter(format!(
                "(q, r) = ({}, {}) must be distinct vertices below {n}",
                self.q, self.r
            )));
        }
        if !(self.growth_bound > 0.0 && self.growth_bound.is_finite()) {
            return Err(Error::InvalidParameter("growth bound b must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter("ε must be positive".into()));
        }
        let span = self.growth_bound.powi(self.m as i32);
        if self.g.abs() > span {
            return Err(Error::InvalidParameter(format!(
                "g = {} is outside [−b^m, b^m] = [−{span}, {span}]",
                self.g
            )));
        }
        Ok(())
    }

    /// Half-width `ε·b^m` of the promise gap.
    pub fn gap(&self) -> f64 {
        self.epsilon * self.growth_bound.powi(self.m as i32)
    }

    /// A verified automorphism exchanging `q` and `r`.
    pub fn exchanging_automorphism(&self) -> Result<Permutation> {
        find_exchanging_automorphism(self.graph.as_ref(), self.q, self.r, self.automorphism.as_ref())
    }
}

/// Result of [`decide_path_difference`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathDecision {
    pub verdict: Verdict,
    pub method: Method,
    pub gap: f64,
    /// Exact `Δ^(m)_qr` (exact method only).
    pub exact: Option<i128>,
    /// Estimate of `Δ^(m)_qr` (sampling method only).
    pub estimate: Option<f64>,
    /// Degree used to rescale `Ã` (sampling method only).
    pub scale: Option<f64>,
    pub plan: Option<EstimatePlan>,
}

/// Decides a path-difference instance.
///
/// The sampling route measures `f(x) = x^m` on `ψ⁻ = (|q⟩ − |r⟩)/√2` for
/// `B = Ã/d`, with accuracy chosen so that `d^m` times the estimator error
/// stays below `ε·b^m`; it answers by comparing the rescaled estimate with `g`
/// and cannot detect promise violations.
pub fn decide_path_difference(inst: &PathDifferenceInstance, method: Method) -> Result<PathDecision> {
    inst.validate()?;
    inst.exchanging_automorphism()?;
    let gap = inst.gap();
    match method {
        Method::Exact => {
            let delta = path_difference_exact(inst.graph.as_ref(), inst.q, inst.r, inst.m)?;
            let value = delta as f64;
            let verdict = if value >= inst.g + gap {
                Verdict::Upper
            } else if value <= inst.g - gap {
                Verdict::Lower
            } else {
                Verdict::PromiseViolated
            };
            Ok(PathDecision {
                verdict,
                method,
                gap,
                exact: Some(delta),
                estimate: None,
                scale: None,
                plan: None,
            })
        }
        Method::QuantumSim { alpha, seed } => {
            let d = inst.graph.degree() as f64;
            if d == 0.0 {
                return Err(Error::InvalidParameter("graph has degree 0".into()));
            }
            let b_obs = adjacency_matrix(inst.graph.as_ref())?.scaled(1.0 / d);
            let n = inst.graph.vertex_count();
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let mut psi = vec![0.0; n];
            psi[inst.q] = s;
            psi[inst.r] = -s;
            let f = FunctionDescriptor::power(inst.m, inst.growth_bound / d)?;
            let d_m = d.powi(inst.m as i32);
            let epsilon = (0.9 * gap / (d_m * (f.sup_norm() + f.lipschitz()))).min(0.5);
            let opts = EstimateOptions {
                epsilon,
                alpha,
                delta: 0.0,
                seed,
                repetitions_override: None,
                perturbation: None,
            };
            let est = estimate_expectation(&b_obs, &complex_vector(&psi), &f, &opts)?;
            let value = est.estimate * d_m;
            Ok(PathDecision {
                verdict: if value >= inst.g {
                    Verdict::Upper
                } else {
                    Verdict::Lower
                },
                method,
                gap,
                exact: None,
                estimate: Some(value),
                scale: Some(d),
                plan: Some(est.plan),
            })
        }
    }
}
