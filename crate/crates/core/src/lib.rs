//! Desk-scale laboratory for spectral measures of sparse symmetric matrices.
//!
//! The crate chains together:
//!
//! * [`linalg`]: sparse oracles, dense Hermitian kernels (eigendecomposition,
//!   powers, exponentials) and spectral measures. This is the brute-force
//!   oracle every other module is checked against.
//! * [`circuits`]: gate circuits over {H, H∘Toffoli}, the circuit
//!   `U = Y†·σz·Y`, the clock unitary `W` and the Hermitian `A = ½(W + W†)`
//!   together with its closed-form spectral measure.
//! * [`phase_estimation`]: simulated phase estimation, post-processing of
//!   outcomes by Lipschitz functions and the repeated-sampling estimator.
//! * [`gadget`]: the ±1/0 → 0/1 substitution producing regular graphs, and
//!   exact walk counting.
//! * [`walks`]: discrete and continuous-time random walks, the decay statistic
//!   `c_qr(t)` and its decision problem.
//! * [`witness`]: the existential variant over paired nodes.
//! * [`experiment`]: configuration, fixtures and JSON/CSV reports used by the
//!   command-line front end.

pub mod circuits;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod gadget;
pub mod linalg;
mod method;
pub mod phase_estimation;
pub mod walks;
pub mod witness;

pub use error::{Error, Result};
pub use method::{Method, Verdict};
