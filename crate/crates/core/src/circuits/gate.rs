use std::fmt;
use std::fmt::Write as _;

use crate::error::parse_error;
use crate::{Error, Result};

/// Largest register the statevector simulator accepts.
pub const STATEVECTOR_CAP: usize = 20;

/// A single gate. Qubit `k` of a `w`-qubit register is bit `w − 1 − k` of
/// the basis index, so qubit 0 (the output qubit) is the most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Hadamard {
        target: usize,
    },
    /// Toffoli followed by a Hadamard on the Toffoli target.
    HadamardToffoli {
        c1: usize,
        c2: usize,
        target: usize,
    },
    /// Hadamard followed by a Toffoli; the adjoint of `HadamardToffoli`.
    ToffoliHadamard {
        c1: usize,
        c2: usize,
        target: usize,
    },
    PauliZ {
        target: usize,
    },
    /// `−σz`: phase −1 on `|0⟩`.
    NegPauliZ {
        target: usize,
    },
    X {
        target: usize,
    },
    CX {
        control: usize,
        target: usize,
    },
    CCX {
        c1: usize,
        c2: usize,
        target: usize,
    },
}

/// Image of a basis state under a gate: at most two signed basis states,
/// scaled by `1/√2` when the gate is Hadamard-type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Terms {
    items: [(usize, i8); 2],
    len: usize,
}

impl Terms {
    fn one(index: usize, sign: i8) -> Self {
        Self {
            items: [(index, sign), (0, 0)],
            len: 1,
        }
    }

    fn two(a: (usize, i8), b: (usize, i8)) -> Self {
        Self { items: [a, b], len: 2 }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.items[..self.len].iter().copied()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[inline]
fn mask(width: usize, qubit: usize) -> usize {
    1 << (width - 1 - qubit)
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Hadamard { target } | Gate::PauliZ { target } | Gate::NegPauliZ { target } | Gate::X { target } => {
                vec![target]
            }
            Gate::CX { control, target } => vec![control, target],
            Gate::HadamardToffoli { c1, c2, target }
            | Gate::ToffoliHadamard { c1, c2, target }
            | Gate::CCX { c1, c2, target } => vec![c1, c2, target],
        }
    }

    /// Hadamard-type gates carry a factor `1/√2`; the rest are signed permutations.
    pub fn is_hadamard_type(&self) -> bool {
        matches!(
            self,
            Gate::Hadamard { .. } | Gate::HadamardToffoli { .. } | Gate::ToffoliHadamard { .. }
        )
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::HadamardToffoli { c1, c2, target } => Gate::ToffoliHadamard { c1, c2, target },
            Gate::ToffoliHadamard { c1, c2, target } => Gate::HadamardToffoli { c1, c2, target },
            other => other,
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let wires = self.wires();
        if let Some(&w) = wires.iter().find(|&&w| w >= width) {
            return Err(Error::InvalidGate(format!(
                "{self}: wire {w} outside a {width}-qubit register"
            )));
        }
        for (a, &x) in wires.iter().enumerate() {
            if wires[a + 1..].contains(&x) {
                return Err(Error::InvalidGate(format!("{self}: repeated wire {x}")));
            }
        }
        Ok(())
    }

    /// `U|k⟩` up to the `1/√2` factor of Hadamard-type gates.
    pub fn action(&self, width: usize, k: usize) -> Terms {
        let hadamard = |k: usize, t: usize| {
            let m = mask(width, t);
            let sign = if k & m == 0 { 1 } else { -1 };
            Terms::two((k & !m, 1), (k | m, sign))
        };
        let toffoli = |k: usize, c1: usize, c2: usize, t: usize| {
            let cm = mask(width, c1) | mask(width, c2);
            if k & cm == cm {
                k ^ mask(width, t)
            } else {
                k
            }
        };
        match *self {
            Gate::Hadamard { target } => hadamard(k, target),
            Gate::HadamardToffoli { c1, c2, target } => hadamard(toffoli(k, c1, c2, target), target),
            Gate::ToffoliHadamard { c1, c2, target } => {
                let h = hadamard(k, target);
                let [(a, sa), (b, sb)] = h.items;
                Terms::two((toffoli(a, c1, c2, target), sa), (toffoli(b, c1, c2, target), sb))
            }
            Gate::PauliZ { target } => Terms::one(k, if k & mask(width, target) == 0 { 1 } else { -1 }),
            Gate::NegPauliZ { target } => Terms::one(k, if k & mask(width, target) == 0 { -1 } else { 1 }),
            Gate::X { target } => Terms::one(k ^ mask(width, target), 1),
            Gate::CX { control, target } => {
                if k & mask(width, control) != 0 {
                    Terms::one(k ^ mask(width, target), 1)
                } else {
                    Terms::one(k, 1)
                }
            }
            Gate::CCX { c1, c2, target } => Terms::one(toffoli(k, c1, c2, target), 1),
        }
    }

    /// Row `i` of the gate matrix (the matrix is real, so this is `U†|i⟩`).
    pub fn row(&self, width: usize, i: usize) -> Terms {
        self.adjoint().action(width, i)
    }

    /// Dense real matrix of the gate on a `width`-qubit register.
    pub fn matrix(&self, width: usize) -> Vec<Vec<f64>> {
        let n = 1usize << width;
        let scale = if self.is_hadamard_type() {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        };
        let mut m = vec![vec![0.0; n]; n];
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for (i, s) in self.action(width, k).iter() {
                m[i][k] += f64::from(s) * scale;
            }
        }
        m
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Hadamard { target } => write!(f, "h {target}"),
            Gate::HadamardToffoli { c1, c2, target } => write!(f, "ht {c1} {c2} {target}"),
            Gate::ToffoliHadamard { c1, c2, target } => write!(f, "th {c1} {c2} {target}"),
            Gate::PauliZ { target } => write!(f, "z {target}"),
            Gate::NegPauliZ { target } => write!(f, "nz {target}"),
            Gate::X { target } => write!(f, "x {target}"),
            Gate::CX { control, target } => write!(f, "cx {control} {target}"),
            Gate::CCX { c1, c2, target } => write!(f, "ccx {c1} {c2} {target}"),
        }
    }
}

/// Ordered gate list acting on `|x, 0⟩`, where `x` fills the leading qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateCircuit {
    width: usize,
    gates: Vec<Gate>,
    input_bits: Vec<bool>,
}

impl GateCircuit {
    pub fn new(width: usize, gates: Vec<Gate>, input_bits: Vec<bool>) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidParameter("circuit width must be positive".into()));
        }
        if input_bits.len() > width {
            return Err(Error::InvalidParameter(format!(
                "{} input bits do not fit in {width} qubits",
                input_bits.len()
            )));
        }
        for g in &gates {
            g.validate(width)?;
        }
        Ok(Self {
            width,
            gates,
            input_bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn input_bits(&self) -> &[bool] {
        &self.input_bits
    }

    /// Same gates on a different classical input.
    pub fn with_input(&self, input_bits: Vec<bool>) -> Result<Self> {
        Self::new(self.width, self.gates.clone(), input_bits)
    }

    pub fn dimension(&self) -> usize {
        1 << self.width
    }

    /// Basis index of `|x, 0⟩`.
    pub fn initial_index(&self) -> usize {
        self.input_bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(q, _)| mask(self.width, q))
            .sum()
    }

    fn check_cap(&self) -> Result<()> {
        if self.width > STATEVECTOR_CAP {
            return Err(Error::StatevectorCapExceeded {
                qubits: self.width,
                cap: STATEVECTOR_CAP,
            });
        }
        Ok(())
    }

    /// Applies the circuit to an arbitrary real state.
    pub fn apply(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.check_cap()?;
        if state.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: state.len(),
            });
        }
        let mut current = state.to_vec();
        let mut next = vec![0.0; current.len()];
        for g in &self.gates {
            let scale = if g.is_hadamard_type() {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                1.0
            };
            next.iter_mut().for_each(|v| *v = 0.0);
            for (k, &amp) in current.iter().enumerate() {
                if amp == 0.0 {
                    continue;
                }
                for (i, s) in g.action(self.width, k).iter() {
                    next[i] += f64::from(s) * scale * amp;
                }
            }
            std::mem::swap(&mut current, &mut next);
        }
        Ok(current)
    }

    /// Final state `Y|x, 0⟩`. All gates are real, so the state is too.
    pub fn statevector(&self) -> Result<Vec<f64>> {
        self.check_cap()?;
        let mut state = vec![0.0; self.dimension()];
        state[self.initial_index()] = 1.0;
        self.apply(&state)
    }

    /// Probability of reading 1 on the output qubit.
    pub fn acceptance_probability(&self) -> Result<f64> {
        let state = self.statevector()?;
        let out = mask(self.width, 0);
        Ok(state
            .iter()
            .enumerate()
            .filter(|(k, _)| k & out != 0)
            .map(|(_, a)| a * a)
            .sum::<f64>()
            .clamp(0.0, 1.0))
    }

    pub fn to_text(&self) -> String {
        let bits: String = if self.input_bits.is_empty() {
            "-".into()
        } else {
            self.input_bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
        };
        let mut out = format!("circuit {} {bits}\n", self.width);
        for g in &self.gates {
            writeln!(out, "{g}").expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| parse_error(1, "missing `circuit <width> <input-bits>` header"))?;
        let (width, input_bits) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["circuit", w, bits] => {
                let width: usize = w.parse().map_err(|e| parse_error(line_no, format!("bad width: {e}")))?;
                let bits = if *bits == "-" {
                    Vec::new()
                } else {
                    bits.chars()
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            other => Err(parse_error(line_no, format!("bad input bit {other:?}"))),
                        })
                        .collect::<Result<Vec<_>>>()?
                };
                (width, bits)
            }
            _ => return Err(parse_error(line_no, "expected `circuit <width> <input-bits>`")),
        };
        let mut gates = Vec::new();
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let nums = fields[1..]
                .iter()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_error(line_no, format!("bad wire index: {e}")))?;
            let gate = match (fields[0], nums.as_slice()) {
                ("h", &[target]) => Gate::Hadamard { target },
                ("ht", &[c1, c2, target]) => Gate::HadamardToffoli { c1, c2, target },
                ("th", &[c1, c2, target]) => Gate::ToffoliHadamard { c1, c2, target },
                ("z", &[target]) => Gate::PauliZ { target },
                ("nz", &[target]) => Gate::NegPauliZ { target },
                ("x", &[target]) => Gate::X { target },
                ("cx", &[control, target]) => Gate::CX { control, target },
                ("ccx", &[c1, c2, target]) => Gate::CCX { c1, c2, target },
                (name, _) => return Err(parse_error(line_no, format!("unknown gate line `{name} …`"))),
            };
            gate.validate(width).map_err(|e| parse_error(line_no, e.to_string()))?;
            gates.push(gate);
        }
        Self::new(width, gates, input_bits)
    }
}
