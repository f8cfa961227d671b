use serde::{Deserialize, Serialize};

use super::{Gate, GateCircuit};
use crate::{Error, Result};

/// Gates accepted in the verifier circuit `Y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateSet {
    /// `{H, H∘Toffoli}` and the adjoint `Toffoli∘H`.
    #[default]
    Universal,
    /// Additionally the classical reversible gates X, CX and CCX.
    WithClassical,
}

impl GateSet {
    pub fn allows(&self, gate: &Gate) -> bool {
        match gate {
            Gate::Hadamard { .. } | Gate::HadamardToffoli { .. } | Gate::ToffoliHadamard { .. } => true,
            Gate::X { .. } | Gate::CX { .. } | Gate::CCX { .. } => *self == GateSet::WithClassical,
            Gate::PauliZ { .. } | Gate::NegPauliZ { .. } => false,
        }
    }
}

/// Which output value receives the phase −1 in the middle of `U`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMark {
    /// `σz`: output `|1⟩` is marked.
    #[default]
    One,
    /// `−σz`: output `|0⟩` is marked.
    Zero,
}

impl PhaseMark {
    fn gate(self) -> Gate {
        match self {
            PhaseMark::One => Gate::PauliZ { target: 0 },
            PhaseMark::Zero => Gate::NegPauliZ { target: 0 },
        }
    }
}

/// `U = Y†·σz·Y` with `Y` restricted to the universal set.
pub fn build_u_circuit(y: &GateCircuit) -> Result<GateCircuit> {
    build_u_circuit_with(y, GateSet::Universal, PhaseMark::One)
}

/// `U = Y†·(±σz)·Y`: the gates of `Y`, the phase gate on the output qubit,
/// then the adjoints of `Y` in reverse order.
pub fn build_u_circuit_with(y: &GateCircuit, set: GateSet, mark: PhaseMark) -> Result<GateCircuit> {
    if let Some(g) = y.gates().iter().find(|g| !set.allows(g)) {
        return Err(Error::GateNotAllowed { gate: g.to_string() });
    }
    let mut gates = Vec::with_capacity(2 * y.len() + 1);
    gates.extend_from_slice(y.gates());
    gates.push(mark.gate());
    gates.extend(y.gates().iter().rev().map(Gate::adjoint));
    GateCircuit::new(y.width(), gates, y.input_bits().to_vec())
}
