use serde::{Deserialize, Serialize};

/// How a decision problem is answered.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum Method {
    /// Brute-force linear algebra; detects promise violations.
    Exact,
    /// Phase-estimation sampling with failure probability `alpha`.
    QuantumSim { alpha: f64, seed: u64 },
}

/// Three-way outcome of a promise problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The upper alternative (`≥ g + gap`, `≥ a·e^{−μT}`, witness exists).
    Upper,
    /// The lower alternative.
    Lower,
    PromiseViolated,
}
