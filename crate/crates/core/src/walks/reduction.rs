use serde::Serialize;

use super::{sweep_times, DecaySample, HardnessParameters, WalkSpectrum};
use crate::circuits::{
    build_clock_hermitian_with, build_u_circuit_with, ClockHermitian, GateCircuit, GateSet, Lowering, PhaseMark,
};
use crate::gadget::{check_graph, AdjacencyOracle, GadgetGraph, SignedSparseMatrix};
use crate::linalg::matrix_exp;
use crate::{Error, Result, Verdict};

/// Gadget graph of a clock whose scaled operator has entries `±1`.
pub fn gadget_of(clock: &ClockHermitian) -> Result<GadgetGraph> {
    let gadget = SignedSparseMatrix::new(clock.a_matrix().clone())?.to_gadget();
    check_graph(&gadget)?;
    Ok(gadget)
}

/// `⟨j|e^{−(d − top·A)t}|j⟩` at the start state `j` of the clock, with
/// `A = ½(W + W†)`, through [`matrix_exp`].
pub fn clock_decay(clock: &ClockHermitian, params: &HardnessParameters, t: f64) -> Result<f64> {
    let generator = clock.unit_matrix()?.scaled(params.top).shifted_negation(params.degree);
    let j = clock.start_index();
    Ok(matrix_exp(&generator, -t)?.re(j, j))
}

/// Outcome of [`verify_decay_reduction`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReductionReport {
    pub clock_size: usize,
    pub alpha1_sq: f64,
    pub parameters: HardnessParameters,
    pub vertices: usize,
    /// Gadget walk `c_qr(t)` against the envelopes with `α₀² = 1 − α₁²`.
    pub samples: Vec<DecaySample>,
    /// Largest `|c_qr(t) − ⟨j|e^{−(4 − 2√2·A)t}|j⟩|` over the samples.
    pub max_identity_error: f64,
    pub c_at_t_star: f64,
    /// `Lower` when `c(T) ≤ e^{−μT}/(2M)`, `Upper` when `c(T) ≥ 2e^{−μT}/(3M)`;
    /// only checked when `α₁² ∉ (1/3, 2/3)`.
    pub separation: Option<Verdict>,
}

/// Number of sampled times in [`verify_decay_reduction`].
const REDUCTION_SAMPLES: usize = 20;

/// Runs the circuit → clock → gadget → walk pipeline for `U = Y†σzY` under
/// the folded lowering and checks
///
/// * `c_qr(t) = ⟨j|e^{−(4 − 2√2·A)t}|j⟩` to 1e−9 at sampled `t ∈ [0, T]`,
/// * `(α₀²/M)e^{−μt} ≤ c_qr(t) ≤ (α₀²/M)e^{−μt} + e^{−νt}`,
/// * the accept/reject separation at `T`.
pub fn verify_decay_reduction(y: &GateCircuit, set: GateSet) -> Result<DecayReductionReport> {
    let u = build_u_circuit_with(y, set, PhaseMark::One)?;
    let clock = build_clock_hermitian_with(&u, Lowering::Folded)?;
    let m = clock.clock_size();
    let params = HardnessParameters::for_gadget(m)?;
    let alpha1_sq = y.acceptance_probability()?;
    let alpha0_sq = 1.0 - alpha1_sq;

    let gadget = gadget_of(&clock)?;
    if !gadget.pairing_automorphism().is_automorphism_of(&gadget) {
        return Err(Error::IdentityFailure(
            "pairing is not an automorphism of the gadget".into(),
        ));
    }
    let (q, r) = gadget.pair_of(clock.start_index());
    let spectrum = WalkSpectrum::new(&gadget)?;

    let mut samples = Vec::with_capacity(REDUCTION_SAMPLES);
    let mut max_identity_error: f64 = 0.0;
    for t in sweep_times(0.0, params.t_star, REDUCTION_SAMPLES)? {
        let c = spectrum.c(q, r, t)?;
        let reference = clock_decay(&clock, &params, t)?;
        max_identity_error = max_identity_error.max((c - reference).abs());
        let lower = params.lower_envelope(t, alpha0_sq);
        let upper = params.upper_envelope(t, alpha0_sq);
        // The envelopes are compared with the positive-sum clock value.
        let slack = 1e-9 * reference + 1e-300;
        if reference < lower - slack || reference > upper + slack {
            return Err(Error::IdentityFailure(format!(
                "c({t}) = {reference:e} leaves the envelope [{lower:e}, {upper:e}]"
            )));
        }
        samples.push(super::DecaySample {
            t,
            c_exact: c,
            lower_envelope: lower,
            upper_envelope: upper,
        });
    }
    if max_identity_error > 1e-9 {
        return Err(Error::IdentityFailure(format!(
            "walk and clock decay differ by {max_identity_error:e}"
        )));
    }

    let t = params.t_star;
    let c_at_t_star = clock_decay(&clock, &params, t)?;
    let scale = (-params.mu * t).exp();
    let separation = if alpha1_sq >= 2.0 / 3.0 - 1e-12 {
        if c_at_t_star > params.accept_threshold * scale {
            return Err(Error::IdentityFailure(format!(
                "accepting circuit: c(T) = {c_at_t_star:e} above e^(−μT)/(2M)"
            )));
        }
        Some(Verdict::Lower)
    } else if alpha1_sq <= 1.0 / 3.0 + 1e-12 {
        if c_at_t_star < params.reject_threshold * scale {
            return Err(Error::IdentityFailure(format!(
                "rejecting circuit: c(T) = {c_at_t_star:e} below 2e^(−μT)/(3M)"
            )));
        }
        Some(Verdict::Upper)
    } else {
        None
    };

    Ok(DecayReductionReport {
        clock_size: m,
        alpha1_sq,
        parameters: params,
        vertices: gadget.vertex_count(),
        samples,
        max_identity_error,
        c_at_t_star,
        separation,
    })
}
