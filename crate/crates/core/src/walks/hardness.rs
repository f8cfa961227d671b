use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::{Error, Result};

/// Decay constants for the walk `e^{−(d − top·Ā)t}` attached to a clock of
/// size `M`, where `Ā` has spectral top `1` and runner-up `cos(π/M)` on the
/// start state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HardnessParameters {
    pub clock_size: usize,
    pub degree: f64,
    pub top: f64,
    /// `d − top`.
    pub mu: f64,
    /// `d − top·cos(π/M)`.
    pub nu: f64,
    /// `T = ln(6M)/(ν − μ)`.
    pub t_star: f64,
    /// `1/(2M)`: `c(T) ≤ accept_threshold·e^{−μT}` when the circuit accepts.
    pub accept_threshold: f64,
    /// `2/(3M)`: `c(T) ≥ reject_threshold·e^{−μT}` when it rejects.
    pub reject_threshold: f64,
}

/// Constants for degree 4 and top `√2`, i.e. `μ = 4 − √2`.
pub fn hardness_parameters(m_gates: usize) -> Result<HardnessParameters> {
    HardnessParameters::new(m_gates, 4.0, SQRT_2)
}

impl HardnessParameters {
    pub fn new(m_gates: usize, degree: f64, top: f64) -> Result<Self> {
        if m_gates < 3 {
            return Err(Error::InvalidParameter(format!("clock size {m_gates} is below 3")));
        }
        if !(top > 0.0 && degree > top && degree.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < top < degree, got top = {top}, degree = {degree}"
            )));
        }
        let m = m_gates as f64;
        let mu = degree - top;
        let nu = degree - top * (PI / m).cos();
        Ok(Self {
            clock_size: m_gates,
            degree,
            top,
            mu,
            nu,
            t_star: (6.0 * m).ln() / (nu - mu),
            accept_threshold: 1.0 / (2.0 * m),
            reject_threshold: 2.0 / (3.0 * m),
        })
    }

    /// Constants for the integer gadget walk, whose top is `2√2`.
    pub fn for_gadget(m_gates: usize) -> Result<Self> {
        Self::new(m_gates, 4.0, 2.0 * SQRT_2)
    }

    /// `(α₀²/M)·e^{−μt}`.
    pub fn lower_envelope(&self, t: f64, alpha0_sq: f64) -> f64 {
        alpha0_sq / self.clock_size as f64 * (-self.mu * t).exp()
    }

    /// `(α₀²/M)·e^{−μt} + e^{−νt}`.
    pub fn upper_envelope(&self, t: f64, alpha0_sq: f64) -> f64 {
        self.lower_envelope(t, alpha0_sq) + (-self.nu * t).exp()
    }
}
