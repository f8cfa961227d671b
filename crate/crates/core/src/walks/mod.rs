//! Classical random walks on regular graphs: the Laplacian, the discrete
//! walk matrix, the decay statistic `c_qr(t)` and its decision problem.

mod decay;
mod hardness;
mod laplacian;
mod reduction;

pub use decay::{
    c_exact, c_exact_dual, decide_decay, decide_decay_with, pair_state, sweep_times, DecayDecision, DecaySample,
    NormBound, SpectralEnvelope, WalkInstance, WalkSpectrum,
};
pub use hardness::{hardness_parameters, HardnessParameters};
pub use laplacian::{discrete_walk_matrix, laplacian_of, laplacian_oracle};
pub use reduction::{clock_decay, gadget_of, verify_decay_reduction, DecayReductionReport};
