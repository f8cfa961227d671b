use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dimension} exceeds the dense materialization cap {cap}")]
    DenseCapExceeded { dimension: usize, cap: usize },

    #[error("statevector of {qubits} qubits exceeds the cap of {cap} qubits")]
    StatevectorCapExceeded { qubits: usize, cap: usize },

    #[error("symmetry violation: entry ({row}, {col}) has no matching mirror entry")]
    SymmetryViolation { row: usize, col: usize },

    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("matrix is not Hermitian: |h[{row},{col}] - conj(h[{col},{row}])| = {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("eigendecomposition did not converge")]
    EigenConvergence,

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("gate `{gate}` is not in the allowed gate set")]
    GateNotAllowed { gate: String },

    #[error("perturbed unitary is {distance:e} away from exp(iB), more than delta = {delta:e}")]
    PerturbationTooLarge { distance: f64, delta: f64 },

    #[error("error budget infeasible: {0}")]
    BudgetInfeasible(String),

    #[error("graph is not regular: vertex {vertex} has degree {found}, expected {expected}")]
    NotRegular {
        vertex: usize,
        expected: usize,
        found: usize,
    },

    #[error("no verified automorphism exchanges vertices {q} and {r}")]
    MissingAutomorphism { q: usize, r: usize },

    #[error("identity check failed: {0}")]
    IdentityFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
