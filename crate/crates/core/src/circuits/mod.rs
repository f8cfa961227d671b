//! Verifier circuits, the circuit `U = Y†·σz·Y`, the clock construction and
//! the closed-form spectral measure it induces.

mod build;
mod clock;
mod gate;
mod measure;
pub mod suite;

pub use build::{build_u_circuit, build_u_circuit_with, GateSet, PhaseMark};
pub use clock::{
    build_clock_hermitian, build_clock_hermitian_with, ClockHermitian, Lowering, RowViolation, Step, CLOCK_SCALE,
};
pub use gate::{Gate, GateCircuit, Terms, STATEVECTOR_CAP};
pub use measure::{analytic_measure, analytic_moment, clock_measure, AnalyticSpectralMeasure};
