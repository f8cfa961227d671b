use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laplacian_of;
use crate::gadget::{find_exchanging_automorphism, AdjacencyOracle, Permutation};
use crate::linalg::{eig, matrix_exp, DenseHermitian, EigenSystem};
use crate::phase_estimation::{estimate_with_eigensystem, EstimateOptions, EstimatePlan, FunctionDescriptor};
use crate::{exec, Error, Method, Result, Verdict};

/// Weights below this are treated as outside the spectral support.
const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

/// Bound `β ≥ ‖L‖` used to rescale the Laplacian for phase estimation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormBound {
    /// `2d`.
    #[default]
    Degree,
    /// Largest absolute row sum of `L`.
    Gershgorin,
}

/// "Decay of probability differences": decide `c_qr(T) ≥ a·e^{−μT}` versus
/// `c_qr(T) ≤ b·e^{−μT}`, promised that `(|q⟩ − |r⟩)/√2` only overlaps
/// Laplacian eigenvalues `≥ μ`.
#[derive(Clone)]
pub struct WalkInstance {
    pub graph: Arc<dyn AdjacencyOracle>,
    pub q: usize,
    pub r: usize,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub t_query: f64,
    pub norm_bound: NormBound,
    pub automorphism: Option<Permutation>,
}

impl std::fmt::Debug for WalkInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WalkInstance")
            .field("vertices", &self.graph.vertex_count())
            .field("degree", &self.graph.degree())
            .field("q", &self.q)
            .field("r", &self.r)
            .field("mu", &self.mu)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("t_query", &self.t_query)
            .finish_non_exhaustive()
    }
}

impl WalkInstance {
    pub fn new(graph: Arc<dyn AdjacencyOracle>, q: usize, r: usize, mu: f64, a: f64, b: f64, t_query: f64) -> Self {
        Self {
            graph,
            q,
            r,
            mu,
            a,
            b,
            t_query,
            norm_bound: NormBound::Degree,
            automorphism: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.vertex_count();
        if self.q >= n || self.r >= n || self.q == self.r {
            return Err(Error::InvalidParameter(format!(
                "(q, r) = ({}, {}) must be distinct vertices below {n}",
                self.q, self.r
            )));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("μ = {} must be positive", self.mu)));
        }
        if !(0.0 < self.b && self.b < self.a && self.a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < b < a < 1, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if !(self.t_query > 0.0 && self.t_query.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "T = {} must be positive",
                self.t_query
            )));
        }
        Ok(())
    }

    /// `(a·e^{−μT}, b·e^{−μT})`.
    pub fn thresholds(&self) -> (f64, f64) {
        let scale = (-self.mu * self.t_query).exp();
        (self.a * scale, self.b * scale)
    }

    pub fn exchanging_automorphism(&self) -> Result<Permutation> {
        find_exchanging_automorphism(self.graph.as_ref(), self.q, self.r, self.automorphism.as_ref())
    }
}

/// `(|q⟩ − |r⟩)/√2` in dimension `n`.
pub fn pair_state(n: usize, q: usize, r: usize) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    psi[q] = Complex64::new(s, 0.0);
    psi[r] = Complex64::new(-s, 0.0);
    psi
}

/// `c_qr(t) = (e^{−Lt})_qq − (e^{−Lt})_qr` through [`matrix_exp`].
pub fn c_exact(inst: &WalkInstance, t: f64) -> Result<f64> {
    let e = matrix_exp(&laplacian_of(inst.graph.as_ref())?, -t)?;
    Ok(e.re(inst.q, inst.q) - e.re(inst.q, inst.r))
}

/// `⟨ψ⁻|e^{−Lt}|ψ⁻⟩`, which equals [`c_exact`] when an automorphism
/// exchanges `q` and `r`.
pub fn c_exact_dual(inst: &WalkInstance, t: f64) -> Result<f64> {
    let e = matrix_exp(&laplacian_of(inst.graph.as_ref())?, -t)?;
    let psi = pair_state(inst.graph.vertex_count(), inst.q, inst.r);
    Ok(e.sandwich(&psi, &psi).re)
}

/// Evenly spaced times from `t0` to `t1` inclusive.
pub fn sweep_times(t0: f64, t1: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::InvalidParameter(format!("bad sweep {t0}:{t1}:{steps}")));
    }
    if steps == 1 {
        return Ok(vec![t0]);
    }
    let h = (t1 - t0) / (steps - 1) as f64;
    Ok((0..steps).map(|k| t0 + h * k as f64).collect())
}

/// Lowest support point of the spectral measure of `ψ⁻` and the next one.
///
/// `floor_weight·e^{−floor·t} ≤ c(t) ≤ floor_weight·e^{−floor·t} + e^{−next·t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralEnvelope {
    pub floor: f64,
    pub floor_weight: f64,
    pub next: Option<f64>,
}

impl SpectralEnvelope {
    pub fn lower(&self, t: f64) -> f64 {
        self.floor_weight * (-self.floor * t).exp()
    }

    pub fn upper(&self, t: f64) -> f64 {
        let rest = self.next.unwrap_or(self.floor);
        self.lower(t) + (1.0 - self.floor_weight).max(0.0) * (-rest * t).exp()
    }
}

/// One row of a `c(t)` sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecaySample {
    pub t: f64,
    pub c_exact: f64,
    pub lower_envelope: f64,
    pub upper_envelope: f64,
}

/// Laplacian of a regular graph with its eigendecomposition, shared by all
/// pair queries on the graph.
#[derive(Clone, Debug)]
pub struct WalkSpectrum {
    degree: usize,
    laplacian: DenseHermitian,
    es: EigenSystem,
}

impl WalkSpectrum {
    pub fn new(g: &dyn AdjacencyOracle) -> Result<Self> {
        let laplacian = laplacian_of(g)?;
        let es = eig(&laplacian)?;
        Ok(Self {
            degree: g.degree(),
            laplacian,
            es,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.es.dimension()
    }

    pub fn laplacian(&self) -> &DenseHermitian {
        &self.laplacian
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.es
    }

    fn check_pair(&self, q: usize, r: usize) -> Result<()> {
        let n = self.dimension();
        if q >= n || r >= n || q == r {
            return Err(Error::InvalidParameter(format!(
                "(q, r) = ({q}, {r}) must be distinct vertices below {n}"
            )));
        }
        Ok(())
    }

    /// `(e^{−Lt})_qq − (e^{−Lt})_qr`, read off the eigendecomposition.
    pub fn c(&self, q: usize, r: usize, t: f64) -> Result<f64> {
        self.check_pair(q, r)?;
        Ok((0..self.dimension())
            .map(|k| {
                let vq = self.es.component(q, k);
                let vr = self.es.component(r, k);
                (-self.es.eigenvalues()[k] * t).exp() * (vq * (vq - vr).conj()).re
            })
            .sum())
    }

    /// Weights of `ψ⁻` on each eigenvector.
    pub fn weights(&self, q: usize, r: usize) -> Result<Vec<f64>> {
        self.check_pair(q, r)?;
        self.es.weights(&pair_state(self.dimension(), q, r))
    }

    /// `⟨ψ⁻|e^{−Lt}|ψ⁻⟩` as a sum of non-negative terms.
    pub fn c_projected(&self, q: usize, r: usize, t: f64) -> Result<f64> {
        let w = self.weights(q, r)?;
        Ok(w.iter()
            .zip(self.es.eigenvalues())
            .map(|(w, l)| w * (-l * t).exp())
            .sum())
    }

    /// Smallest Laplacian eigenvalue carrying weight of `ψ⁻`.
    pub fn support_min(&self, q: usize, r: usize) -> Result<f64> {
        let w = self.weights(q, r)?;
        Ok(w.iter()
            .zip(self.es.eigenvalues())
            .filter(|(w, _)| **w > SUPPORT_WEIGHT_TOL)
            .map(|(_, l)| *l)
            .fold(f64::INFINITY, f64::min))
    }

    pub fn envelope(&self, q: usize, r: usize) -> Result<SpectralEnvelope> {
        let w = self.weights(q, r)?;
        let support: Vec<(f64, f64)> = self
            .es
            .eigenvalues()
            .iter()
            .zip(&w)
            .filter(|(_, w)| **w > SUPPORT_WEIGHT_TOL)
            .map(|(l, w)| (*l, *w))
            .collect();
        let floor = support.first().map(|s| s.0).unwrap_or(0.0);
        let near = |l: f64| (l - floor).abs() <= 1e-8 * (1.0 + floor.abs());
        Ok(SpectralEnvelope {
            floor,
            floor_weight: support.iter().filter(|s| near(s.0)).map(|s| s.1).sum(),
            next: support.iter().map(|s| s.0).find(|&l| !near(l)),
        })
    }

    /// `c(t)` with the spectral envelopes at each time, in parallel over `ts`.
    pub fn sweep(&self, q: usize, r: usize, ts: &[f64]) -> Result<Vec<DecaySample>> {
        let env = self.envelope(q, r)?;
        exec::try_map_range(ts.len(), |k| -> Result<DecaySample> {
            let t = ts[k];
            Ok(DecaySample {
                t,
                c_exact: self.c(q, r, t)?,
                lower_envelope: env.lower(t),
                upper_envelope: env.upper(t),
            })
        })
    }

    fn eigenvalue_tolerance(&self) -> f64 {
        let top = self.es.eigenvalues().last().copied().unwrap_or(0.0).abs();
        1e-9 * top.max(1.0)
    }
}

/// Result of [`decide_decay`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayDecision {
    pub verdict: Verdict,
    pub method: Method,
    /// `a·e^{−μT}`.
    pub upper_threshold: f64,
    /// `b·e^{−μT}`.
    pub lower_threshold: f64,
    /// Exact `c_qr(T)` (exact method only).
    pub c: Option<f64>,
    /// Smallest eigenvalue in the support of `ψ⁻` (exact method only).
    pub support_min: Option<f64>,
    /// Estimate of `c_qr(T)` (sampling method only).
    pub estimate: Option<f64>,
    /// Rescaling bound `β ≥ ‖L‖` (sampling method only).
    pub beta: Option<f64>,
    pub plan: Option<EstimatePlan>,
}

/// Decides a decay instance, computing the Laplacian spectrum first.
pub fn decide_decay(inst: &WalkInstance, method: Method) -> Result<DecayDecision> {
    inst.validate()?;
    inst.exchanging_automorphism()?;
    let spectrum = WalkSpectrum::new(inst.graph.as_ref())?;
    decide_decay_with(&spectrum, inst, method)
}

/// [`decide_decay`] with a precomputed spectrum of `inst.graph`; the
/// automorphism is not re-checked.
///
/// The exact route reports a promise violation when `ψ⁻` overlaps an
/// eigenvalue below `μ` or when `c_qr(T)` falls strictly between the
/// thresholds. The sampling route estimates `⟨ψ⁻|f(L/β)|ψ⁻⟩` with
/// `f(x) = e^{−xβT}` on `[μ/β, ∞)` to accuracy a fraction of the gap and
/// compares it with the midpoint.
pub fn decide_decay_with(spectrum: &WalkSpectrum, inst: &WalkInstance, method: Method) -> Result<DecayDecision> {
    inst.validate()?;
    if spectrum.dimension() != inst.graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: inst.graph.vertex_count(),
            found: spectrum.dimension(),
        });
    }
    let (hi, lo) = inst.thresholds();
    let mut decision = DecayDecision {
        verdict: Verdict::PromiseViolated,
        method,
        upper_threshold: hi,
        lower_threshold: lo,
        c: None,
        support_min: None,
        estimate: None,
        beta: None,
        plan: None,
    };
    match method {
        Method::Exact => {
            let floor = spectrum.support_min(inst.q, inst.r)?;
            let c = spectrum.c(inst.q, inst.r, inst.t_query)?;
            decision.c = Some(c);
            decision.support_min = Some(floor);
            if floor >= inst.mu - spectrum.eigenvalue_tolerance() {
                if c >= hi {
                    decision.verdict = Verdict::Upper;
                } else if c <= lo {
                    decision.verdict = Verdict::Lower;
                }
            }
        }
        Method::QuantumSim { alpha, seed } => {
            let beta = match inst.norm_bound {
                NormBound::Degree => 2.0 * spectrum.degree() as f64,
                NormBound::Gershgorin => spectrum.laplacian().gershgorin_bound(),
            };
            if beta <= 0.0 {
                return Err(Error::InvalidParameter("Laplacian is zero".into()));
            }
            let es = spectrum.eigensystem().scaled(1.0 / beta)?;
            let f = FunctionDescriptor::decay(beta * inst.t_query, inst.mu / beta)?;
            let epsilon = (0.45 * (inst.a - inst.b) / (1.0 + beta * inst.t_query)).min(0.5);
            let opts = EstimateOptions::new(epsilon, alpha).with_seed(seed);
            let psi = pair_state(spectrum.dimension(), inst.q, inst.r);
            let est = estimate_with_eigensystem(&es, &psi, &f, &opts)?;
            decision.verdict = if est.estimate >= 0.5 * (hi + lo) {
                Verdict::Upper
            } else {
                Verdict::Lower
            };
            decision.estimate = Some(est.estimate);
            decision.beta = Some(beta);
            decision.plan = Some(est.plan);
        }
    }
    Ok(decision)
}
