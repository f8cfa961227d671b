use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuits::{GateSet, Lowering, PhaseMark};
use crate::walks::NormBound;
use crate::{Error, Method, Result};

/// Current report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Which route answers a query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    #[default]
    Exact,
    QuantumSim,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_epsilon() -> f64 {
    0.1
}

/// A fully specified run. Unknown keys are rejected, and every result is a
/// function of the config (the seed included).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default)]
    pub instance: Option<PathBuf>,
    #[serde(default)]
    pub method: MethodKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    /// Adds wall-clock timings, which makes reports non-reproducible.
    #[serde(default)]
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            instance: None,
            method: MethodKind::Exact,
            alpha: default_alpha(),
            seed: 0,
            output: None,
            csv: None,
            timings: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn method(&self) -> Result<Method> {
        match self.method {
            MethodKind::Exact => Ok(Method::Exact),
            MethodKind::QuantumSim => {
                if !(self.alpha > 0.0 && self.alpha < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "α = {} must lie in (0, 1)",
                        self.alpha
                    )));
                }
                Ok(Method::QuantumSim {
                    alpha: self.alpha,
                    seed: self.seed,
                })
            }
        }
    }
}

/// Subcommand with its knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "subcommand",
    rename_all = "kebab-case",
    rename_all_fields = "kebab-case",
    deny_unknown_fields
)]
pub enum Task {
    /// Spectral measure of a basis state; for circuits also the closed form.
    Spectral {
        #[serde(default)]
        j: Option<usize>,
        #[serde(default)]
        gate_set: GateSet,
        #[serde(default)]
        mark: PhaseMark,
        #[serde(default)]
        lowering: Lowering,
    },
    /// `(A^m)_jj`, exactly or by phase-estimation sampling.
    DiagEntry {
        #[serde(default)]
        j: Option<usize>,
        m: u32,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default)]
        delta: f64,
        #[serde(default)]
        repetitions_override: Option<u64>,
        #[serde(default)]
        gate_set: GateSet,
        #[serde(default)]
        mark: PhaseMark,
        #[serde(default)]
        lowering: Lowering,
    },
    /// Difference of numbers of paths.
    Paths {
        q: usize,
        r: usize,
        m: u32,
        g: f64,
        epsilon: f64,
        b: f64,
        #[serde(default)]
        perm: Option<PathBuf>,
    },
    /// Decay of probability differences, with an optional `c(t)` sweep.
    Walk {
        q: usize,
        r: usize,
        #[serde(rename = "T")]
        t_query: f64,
        mu: f64,
        a: f64,
        b: f64,
        /// Extra times at which `c(t)` is reported.
        #[serde(default)]
        t: Vec<f64>,
        #[serde(default)]
        sweep: Option<Sweep>,
        #[serde(default)]
        norm_bound: NormBound,
        #[serde(default)]
        perm: Option<PathBuf>,
    },
    /// Existential decay over pairs; from a graph or from a verifier circuit.
    Witness {
        #[serde(default)]
        n_tilde: Option<usize>,
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
        #[serde(default, rename = "T")]
        t_query: Option<f64>,
        #[serde(default)]
        witness_wires: Vec<usize>,
        #[serde(default)]
        gate_set: GateSet,
        #[serde(default)]
        norm_bound: NormBound,
    },
    /// Gadget identities `(A^n)_jj = Δ^(n)` and the direct-sum check.
    Reduce {
        #[serde(default)]
        j: Option<usize>,
        m: u32,
        #[serde(default)]
        gate_set: GateSet,
        #[serde(default)]
        mark: PhaseMark,
    },
    /// Circuit → clock → gadget → walk pipeline checks.
    Verify {
        #[serde(default)]
        gate_set: GateSet,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Spectral { .. } => "spectral",
            Task::DiagEntry { .. } => "diag-entry",
            Task::Paths { .. } => "paths",
            Task::Walk { .. } => "walk",
            Task::Witness { .. } => "witness",
            Task::Reduce { .. } => "reduce",
            Task::Verify { .. } => "verify",
        }
    }
}

/// `t0:t1:steps`, evenly spaced and inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("sweep `{s}` is not t0:t1:steps"));
        let parts: Vec<&str> = s.split(':').collect();
        let [t0, t1, steps] = parts.as_slice() else {
            return Err(bad());
        };
        Ok(Self {
            t0: t0.trim().parse().map_err(|_| bad())?,
            t1: t1.trim().parse().map_err(|_| bad())?,
            steps: steps.trim().parse().map_err(|_| bad())?,
        })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.t0, self.t1, self.steps)
    }
}

impl Serialize for Sweep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Sweep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "task": {"subcommand": "paths", "q": 0, "r": 1, "m": 2, "g": 0.0, "epsilon": 0.5, "b": 1.0},
            "instance": "k5.graph",
            "seed": 3
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.task.name(), "paths");
        assert_eq!(cfg.alpha, 0.05);
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_keys_rejected() {
        let top = r#"{"task": {"subcommand": "verify"}, "colour": 1}"#;
        assert!(ExperimentConfig::from_json(top).is_err());
        let inner = r#"{"task": {"subcommand": "verify", "colour": 1}}"#;
        assert!(ExperimentConfig::from_json(inner).is_err());
    }

    #[test]
    fn sweeps() {
        let s: Sweep = "0:5:11".parse().unwrap();
        assert_eq!(s.steps, 11);
        assert_eq!(s.to_string(), "0:5:11");
        assert!("0:5".parse::<Sweep>().is_err());
        let walk = r#"{"task": {"subcommand": "walk", "q": 0, "r": 1, "T": 1.0, "mu": 2.0,
            "a": 0.9, "b": 0.5, "sweep": "0:5:6"}}"#;
        let cfg = ExperimentConfig::from_json(walk).unwrap();
        assert!(matches!(cfg.task, Task::Walk { sweep: Some(_), .. }));
    }
}
