//! Seeded circuit families shared by tests, fixtures and the acceptance suite.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    build_clock_hermitian_with, build_u_circuit_with, ClockHermitian, Gate, GateCircuit, GateSet, Lowering, PhaseMark,
};
use crate::Result;

/// Random verifier circuit over `set` with `gates` gates on `width ≥ 3`
/// qubits (Toffoli-type gates need three distinct wires).
pub fn random_circuit(width: usize, gates: usize, set: GateSet, seed: u64) -> Result<GateCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list = Vec::with_capacity(gates);
    for _ in 0..gates {
        let kinds = match set {
            GateSet::Universal => 3,
            GateSet::WithClassical => 6,
        };
        let kind = if width < 3 { 0 } else { rng.random_range(0..kinds) };
        let w = sample(&mut rng, width, width.min(3)).into_vec();
        list.push(match kind {
            0 => Gate::Hadamard { target: w[0] },
            1 => Gate::HadamardToffoli {
                c1: w[1],
                c2: w[2],
                target: w[0],
            },
            2 => Gate::ToffoliHadamard {
                c1: w[1],
                c2: w[2],
                target: w[0],
            },
            3 => Gate::X { target: w[0] },
            4 => Gate::CX {
                control: w[1],
                target: w[0],
            },
            _ => Gate::CCX {
                c1: w[1],
                c2: w[2],
                target: w[0],
            },
        });
    }
    let input_bits = (0..rng.random_range(0..=width)).map(|_| rng.random()).collect();
    GateCircuit::new(width, list, input_bits)
}

/// Deterministic circuit whose output is `accept` on input `|0…0⟩`.
///
/// `pairs` copies of `H·H` on the last qubit pad the gate count; an `X` on
/// the output makes it accept.
pub fn deterministic_circuit(width: usize, pairs: usize, accept: bool) -> Result<GateCircuit> {
    let last = width - 1;
    let mut gates = Vec::new();
    if accept {
        gates.push(Gate::X { target: 0 });
    }
    for _ in 0..pairs {
        gates.push(Gate::Hadamard { target: last });
        gates.push(Gate::Hadamard { target: last });
    }
    GateCircuit::new(width, gates, vec![false; width])
}

/// Width-2 circuit whose output qubit is deterministic: `H` on qubit 1,
/// then `X` on the output when `accept`, then `hadamards − 1` more `H`.
///
/// Every `X` follows a Hadamard, so the folded lowering applies when
/// `hadamards ≥ 2`; it then has `M = 2·hadamards`. The literal lowering has
/// `M = 2·(hadamards + accept) + 1`.
pub fn deterministic_family(hadamards: usize, accept: bool) -> Result<GateCircuit> {
    let mut gates = Vec::new();
    for k in 0..hadamards {
        gates.push(Gate::Hadamard { target: 1 });
        if k == 0 && accept {
            gates.push(Gate::X { target: 0 });
        }
    }
    if hadamards == 0 && accept {
        gates.push(Gate::X { target: 0 });
    }
    GateCircuit::new(2, gates, vec![false; 2])
}

/// A named clock instance of the standard suite.
#[derive(Clone, Debug)]
pub struct SuiteInstance {
    pub name: String,
    pub y: GateCircuit,
    pub set: GateSet,
    pub mark: PhaseMark,
    pub lowering: Lowering,
}

impl SuiteInstance {
    pub fn clock(&self) -> Result<ClockHermitian> {
        let u = build_u_circuit_with(&self.y, self.set, self.mark)?;
        build_clock_hermitian_with(&u, self.lowering)
    }
}

/// Clock instances with width ≤ 6 and `M ≤ 15`, covering both lowerings,
/// both phase marks, random and deterministic circuits.
pub fn clock_suite() -> Vec<SuiteInstance> {
    let mut out = Vec::new();
    let mut push = |name: String, y: GateCircuit, set, mark, lowering| {
        out.push(SuiteInstance {
            name,
            y,
            set,
            mark,
            lowering,
        });
    };
    for (width, gates) in [(1usize, 1usize), (1, 3), (2, 2), (3, 4), (4, 5), (5, 6), (6, 7), (6, 3)] {
        for seed in 0..2u64 {
            let y = random_circuit(width, gates, GateSet::Universal, 100 * width as u64 + seed)
                .expect("valid random circuit");
            push(
                format!("literal-w{width}-g{gates}-s{seed}"),
                y.clone(),
                GateSet::Universal,
                PhaseMark::One,
                Lowering::Literal,
            );
            if gates >= 2 {
                push(
                    format!("folded-w{width}-g{gates}-s{seed}"),
                    y,
                    GateSet::Universal,
                    if seed == 0 { PhaseMark::One } else { PhaseMark::Zero },
                    Lowering::Folded,
                );
            }
        }
    }
    for (width, gates) in [(3usize, 5usize), (4, 7), (6, 6)] {
        let y = random_circuit(width, gates, GateSet::WithClassical, 7 * width as u64).expect("valid random circuit");
        push(
            format!("classical-w{width}-g{gates}"),
            y,
            GateSet::WithClassical,
            PhaseMark::One,
            Lowering::Literal,
        );
    }
    for accept in [false, true] {
        for (width, pairs) in [(1usize, 1usize), (2, 2), (3, 3)] {
            let y = deterministic_circuit(width, pairs, accept).expect("valid deterministic circuit");
            push(
                format!(
                    "deterministic-{}-w{width}-p{pairs}",
                    if accept { "accept" } else { "reject" }
                ),
                y,
                GateSet::WithClassical,
                PhaseMark::One,
                Lowering::Literal,
            );
        }
    }
    out
}
