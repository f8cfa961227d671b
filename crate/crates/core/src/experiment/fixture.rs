use crate::circuits::{build_clock_hermitian_with, build_u_circuit_with, GateCircuit, GateSet, Lowering, PhaseMark};
use crate::gadget::{AdjacencyOracle, Graph};
use crate::linalg::write_symmetric;
use crate::walks::gadget_of;
use crate::Result;

/// What [`generate_fixture`] builds.
#[derive(Clone, Debug, PartialEq)]
pub enum FixtureKind {
    /// Folded clock of `U = Y†(±σz)Y`: source matrix, gadget graph, pairing
    /// automorphism and the start pair.
    Clock {
        circuit: GateCircuit,
        gate_set: GateSet,
        mark: PhaseMark,
    },
    KComplete {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    /// Seeded pairing model, rejecting until the graph is simple.
    RandomRegular {
        n: usize,
        d: usize,
        seed: u64,
    },
}

/// One generated file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureFile {
    pub name: String,
    pub contents: String,
}

fn file(name: impl Into<String>, contents: String) -> FixtureFile {
    FixtureFile {
        name: name.into(),
        contents,
    }
}

/// Deterministic fixture contents; nothing is written.
pub fn generate_fixture(kind: &FixtureKind) -> Result<Vec<FixtureFile>> {
    match kind {
        FixtureKind::KComplete { n } => Ok(vec![file(format!("k{n}.graph"), Graph::complete(*n)?.to_text())]),
        FixtureKind::Cycle { n } => Ok(vec![file(format!("cycle{n}.graph"), Graph::cycle(*n)?.to_text())]),
        FixtureKind::RandomRegular { n, d, seed } => Ok(vec![file(
            format!("rr-n{n}-d{d}-s{seed}.graph"),
            Graph::random_regular(*n, *d, *seed)?.to_text(),
        )]),
        FixtureKind::Clock {
            circuit,
            gate_set,
            mark,
        } => {
            let u = build_u_circuit_with(circuit, *gate_set, *mark)?;
            let clock = build_clock_hermitian_with(&u, Lowering::Folded)?;
            let gadget = gadget_of(&clock)?;
            let (q, r) = gadget.pair_of(clock.start_index());
            Ok(vec![
                file("clock.matrix", write_symmetric(clock.a_matrix())?),
                file("clock.graph", Graph::from_oracle(&gadget)?.to_text()),
                file("clock.perm", gadget.pairing_automorphism().to_text()),
                file(
                    "clock.pair",
                    format!(
                        "pair {q} {r}\nsource {}\nclock-size {}\nvertices {}\n",
                        clock.start_index(),
                        clock.clock_size(),
                        gadget.vertex_count()
                    ),
                ),
            ])
        }
    }
}
