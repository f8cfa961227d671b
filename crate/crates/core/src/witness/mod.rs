//! The existential decay problem over paired vertices `(2j, 2j + 1)`:
//! does some pair `j < Ñ` decay slowly? Witnesses are enumerated
//! exhaustively, one [`decide_decay_with`](crate::walks::decide_decay_with)
//! call per pair.

mod decide;
mod family;

pub use decide::{decide_witness, PairReport, WitnessDecision, WitnessInstance, WitnessVerdict};
pub use family::{
    build_witness_instance, equality_verifier, ConstructionSummary, WitnessConstruction, WitnessFamily,
    MAX_WITNESS_QUBITS,
};
