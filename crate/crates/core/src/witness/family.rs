use std::sync::Arc;

use serde::Serialize;

use super::WitnessInstance;
use crate::circuits::{
    build_clock_hermitian_with, build_u_circuit_with, Gate, GateCircuit, GateSet, Lowering, PhaseMark,
};
use crate::gadget::{relabel, AdjacencyOracle, Permutation};
use crate::linalg::dense_cap;
use crate::walks::{gadget_of, HardnessParameters, NormBound};
use crate::{Error, Result};

/// Largest witness register handled by exhaustive enumeration.
pub const MAX_WITNESS_QUBITS: usize = 6;

/// A verifier circuit `Y` whose input bits on `witness_wires` range over all
/// witness strings; every other input bit is 0. Witness `j` puts bit
/// `r − 1 − k` of `j` on `witness_wires[k]`.
#[derive(Clone, Debug)]
pub struct WitnessFamily {
    verifier: GateCircuit,
    witness_wires: Vec<usize>,
    set: GateSet,
}

impl WitnessFamily {
    pub fn new(verifier: GateCircuit, witness_wires: Vec<usize>, set: GateSet) -> Result<Self> {
        let w = verifier.width();
        if witness_wires.len() > MAX_WITNESS_QUBITS {
            return Err(Error::InvalidParameter(format!(
                "{} witness qubits exceed the cap of {MAX_WITNESS_QUBITS}",
                witness_wires.len()
            )));
        }
        for (k, &wire) in witness_wires.iter().enumerate() {
            if wire == 0 || wire >= w || witness_wires[..k].contains(&wire) {
                return Err(Error::InvalidParameter(format!(
                    "witness wire {wire} must be distinct, nonzero and below {w}"
                )));
            }
        }
        Ok(Self {
            verifier,
            witness_wires,
            set,
        })
    }

    pub fn verifier(&self) -> &GateCircuit {
        &self.verifier
    }

    pub fn witness_qubits(&self) -> usize {
        self.witness_wires.len()
    }

    pub fn witness_count(&self) -> usize {
        1 << self.witness_wires.len()
    }

    /// `Y` with witness `j` loaded.
    pub fn circuit_for(&self, j: usize) -> Result<GateCircuit> {
        let r = self.witness_qubits();
        let mut bits = vec![false; self.verifier.width()];
        for (k, &wire) in self.witness_wires.iter().enumerate() {
            bits[wire] = (j >> (r - 1 - k)) & 1 == 1;
        }
        self.verifier.with_input(bits)
    }

    pub fn acceptance_probabilities(&self) -> Result<Vec<f64>> {
        (0..self.witness_count())
            .map(|j| self.circuit_for(j)?.acceptance_probability())
            .collect()
    }
}

/// Verifier accepting exactly the witness `target` on `r` witness qubits.
///
/// Wires: output 0, witness `1..=r`, then `r − 2` work qubits for the AND
/// chain. A leading `H·H` on wire 1 makes the folded clock well defined.
pub fn equality_verifier(r: usize, target: usize) -> Result<WitnessFamily> {
    if r == 0 || r > 4 || target >= 1 << r {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ r ≤ 4 and target < 2^r, got r = {r}, target = {target}"
        )));
    }
    let work = r.saturating_sub(2);
    let width = 1 + r + work;
    let mut gates = vec![Gate::Hadamard { target: 1 }, Gate::Hadamard { target: 1 }];
    for k in 0..r {
        if (target >> (r - 1 - k)) & 1 == 0 {
            gates.push(Gate::X { target: 1 + k });
        }
    }
    match r {
        1 => gates.push(Gate::CX { control: 1, target: 0 }),
        _ => {
            // acc holds the AND of the first k witness bits.
            let mut acc = 1;
            for k in 1..r {
                let target = if k == r - 1 { 0 } else { r + k };
                gates.push(Gate::CCX {
                    c1: acc,
                    c2: 1 + k,
                    target,
                });
                acc = target;
            }
        }
    }
    let verifier = GateCircuit::new(width, gates, vec![false; width])?;
    WitnessFamily::new(verifier, (1..=r).collect(), GateSet::WithClassical)
}

/// Output of [`build_witness_instance`].
#[derive(Clone, Debug)]
pub struct WitnessConstruction {
    pub instance: WitnessInstance,
    pub parameters: HardnessParameters,
    /// Acceptance probability of each witness.
    pub acceptance: Vec<f64>,
}

/// Serializable summary of a [`WitnessConstruction`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionSummary {
    pub vertices: usize,
    pub n_tilde: usize,
    pub parameters: HardnessParameters,
    pub acceptance: Vec<f64>,
}

impl WitnessConstruction {
    pub fn summary(&self) -> ConstructionSummary {
        ConstructionSummary {
            vertices: self.instance.graph.vertex_count(),
            n_tilde: self.instance.n_tilde,
            parameters: self.parameters,
            acceptance: self.acceptance.clone(),
        }
    }
}

/// Builds one gadget graph for the whole family from `U = Y†(−σz)Y` under
/// the folded lowering, then renames source indices so that the start state
/// of witness `j` becomes index `j`, i.e. the pair `(2j, 2j + 1)`. Ñ is the
/// number of witness strings; the thresholds are `a = 2/(3M)`, `b = 1/(2M)`.
pub fn build_witness_instance(family: &WitnessFamily) -> Result<WitnessConstruction> {
    let u = build_u_circuit_with(&family.circuit_for(0)?, family.set, PhaseMark::Zero)?;
    let clock = build_clock_hermitian_with(&u, Lowering::Folded)?;
    let vertices = 2 * clock.dimension();
    let cap = dense_cap();
    if vertices > cap {
        return Err(Error::DenseCapExceeded {
            dimension: vertices,
            cap,
        });
    }
    let gadget = gadget_of(&clock)?;
    let n_tilde = family.witness_count();
    let starts = (0..n_tilde)
        .map(|j| Ok(clock.index_of(0, family.circuit_for(j)?.initial_index())))
        .collect::<Result<Vec<usize>>>()?;

    let d = clock.dimension();
    let mut source = vec![usize::MAX; d];
    for (j, &s) in starts.iter().enumerate() {
        source[s] = j;
    }
    for (next, slot) in (n_tilde..).zip(source.iter_mut().filter(|s| **s == usize::MAX)) {
        *slot = next;
    }
    let vertex_perm = Permutation::new((0..vertices).map(|v| 2 * source[v / 2] + v % 2).collect())?;
    let graph = relabel(&gadget, &vertex_perm)?;

    let parameters = HardnessParameters::for_gadget(clock.clock_size())?;
    let instance = WitnessInstance {
        graph: Arc::new(graph),
        n_tilde,
        mu: parameters.mu,
        a: parameters.reject_threshold,
        b: parameters.accept_threshold,
        t_query: parameters.t_star,
        norm_bound: NormBound::Degree,
    };
    instance.validate()?;
    Ok(WitnessConstruction {
        instance,
        parameters,
        acceptance: family.acceptance_probabilities()?,
    })
}
