use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gadget::{relabel, AdjacencyOracle, Permutation};
use crate::walks::{decide_decay_with, DecayDecision, NormBound, WalkInstance, WalkSpectrum};
use crate::{exec, Error, Method, Result, Verdict};

/// A regular graph on `2N` vertices whose pairing `2j ↔ 2j + 1` is an
/// automorphism, with decay parameters shared by all candidate pairs `j < Ñ`.
#[derive(Clone)]
pub struct WitnessInstance {
    pub graph: Arc<dyn AdjacencyOracle>,
    pub n_tilde: usize,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub t_query: f64,
    pub norm_bound: NormBound,
}

impl std::fmt::Debug for WitnessInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WitnessInstance")
            .field("vertices", &self.graph.vertex_count())
            .field("n_tilde", &self.n_tilde)
            .field("mu", &self.mu)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("t_query", &self.t_query)
            .finish_non_exhaustive()
    }
}

impl WitnessInstance {
    /// Checks `Ñ ≤ N` and that the pairing is an automorphism.
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.vertex_count();
        if n % 2 == 1 {
            return Err(Error::InvalidParameter(format!("vertex count {n} is odd")));
        }
        if self.n_tilde > n / 2 {
            return Err(Error::InvalidParameter(format!(
                "Ñ = {} exceeds the {} available pairs",
                self.n_tilde,
                n / 2
            )));
        }
        if !Permutation::pairing(n)?.is_automorphism_of(self.graph.as_ref()) {
            return Err(Error::MissingAutomorphism { q: 0, r: 1 });
        }
        Ok(())
    }

    /// The decay instance for pair `j`.
    pub fn pair_instance(&self, j: usize) -> WalkInstance {
        let mut inst = WalkInstance::new(
            self.graph.clone(),
            2 * j,
            2 * j + 1,
            self.mu,
            self.a,
            self.b,
            self.t_query,
        );
        inst.norm_bound = self.norm_bound;
        inst
    }

    /// Moves pair `j` to pair `perm(j)`; `perm` acts on the `N` pairs.
    pub fn relabel_pairs(&self, perm: &Permutation) -> Result<Self> {
        let n = self.graph.vertex_count();
        if 2 * perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n / 2,
                found: perm.len(),
            });
        }
        let vertices = Permutation::new((0..n).map(|v| 2 * perm.apply(v / 2) + v % 2).collect())?;
        self.relabel_vertices(&vertices)
    }

    /// Renames every vertex; the pairing must still be an automorphism.
    pub fn relabel_vertices(&self, perm: &Permutation) -> Result<Self> {
        let relabeled = Self {
            graph: Arc::new(relabel(self.graph.as_ref(), perm)?),
            ..self.clone()
        };
        relabeled.validate()?;
        Ok(relabeled)
    }
}

/// Answer of [`decide_witness`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum WitnessVerdict {
    /// Smallest slow-decay pair.
    Exists {
        j: usize,
    },
    None,
    PromiseViolated,
}

/// Per-pair outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub j: usize,
    pub decision: DecayDecision,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessDecision {
    pub verdict: WitnessVerdict,
    pub pairs: Vec<PairReport>,
}

/// Evaluates every pair `j < Ñ`.
///
/// In sampling mode pair `j` runs with failure probability `α/Ñ` and seed
/// drawn from stream `j` of a ChaCha8 generator keyed by the run seed. The
/// exact mode reports a promise violation if any pair violates its promise.
pub fn decide_witness(inst: &WitnessInstance, method: Method) -> Result<WitnessDecision> {
    inst.validate()?;
    if inst.n_tilde == 0 {
        return Ok(WitnessDecision {
            verdict: WitnessVerdict::None,
            pairs: Vec::new(),
        });
    }
    let spectrum = WalkSpectrum::new(inst.graph.as_ref())?;
    let pairs = exec::try_map_range(inst.n_tilde, |j| -> Result<PairReport> {
        let pair_method = match method {
            Method::Exact => Method::Exact,
            Method::QuantumSim { alpha, seed } => Method::QuantumSim {
                alpha: alpha / inst.n_tilde as f64,
                seed: pair_seed(seed, j),
            },
        };
        Ok(PairReport {
            j,
            decision: decide_decay_with(&spectrum, &inst.pair_instance(j), pair_method)?,
        })
    })?;
    let violated = pairs.iter().any(|p| p.decision.verdict == Verdict::PromiseViolated);
    let verdict = if violated {
        WitnessVerdict::PromiseViolated
    } else {
        pairs
            .iter()
            .find(|p| p.decision.verdict == Verdict::Upper)
            .map_or(WitnessVerdict::None, |p| WitnessVerdict::Exists { j: p.j })
    };
    Ok(WitnessDecision { verdict, pairs })
}

fn pair_seed(seed: u64, j: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j as u64);
    rng.next_u64()
}
