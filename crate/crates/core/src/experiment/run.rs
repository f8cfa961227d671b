use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::instance::{load_instance, load_permutation, Instance};
use super::{ExperimentConfig, Task, SCHEMA_VERSION};
use crate::circuits::{build_clock_hermitian_with, build_u_circuit_with, clock_measure, Lowering, CLOCK_SCALE};
use crate::gadget::{
    adjacency_matrix, decide_path_difference, direct_sum_check, psi_minus_moment, verify_reduction_identity,
    AdjacencyOracle, PathDifferenceInstance, SignedSparseMatrix,
};
use crate::linalg::{basis_vector, eig, matrix_power, project_state, DenseHermitian, SpectralMeasure};
use crate::phase_estimation::{estimate_expectation, EstimateOptions, FunctionDescriptor};
use crate::walks::{decide_decay_with, sweep_times, verify_decay_reduction, DecaySample, WalkInstance, WalkSpectrum};
use crate::witness::{build_witness_instance, decide_witness, WitnessFamily, WitnessInstance, WitnessVerdict};
use crate::{Error, Result, Verdict};

/// Exit status for a run that reached a decision or passed its checks.
pub const EXIT_OK: i32 = 0;
/// Exit status for errors (bad input, caps, failed identities).
pub const EXIT_ERROR: i32 = 1;
/// Exit status when the instance violates its promise.
pub const EXIT_PROMISE_VIOLATED: i32 = 2;

/// Report text and exit status of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    /// Pretty-printed JSON with a trailing newline.
    pub report: String,
    pub csv: Option<String>,
    pub exit_code: i32,
}

struct TaskOutput {
    result: Value,
    verdict: Option<String>,
    promise_violated: bool,
    csv: Option<String>,
}

impl TaskOutput {
    fn plain(result: Value) -> Self {
        Self {
            result,
            verdict: None,
            promise_violated: false,
            csv: None,
        }
    }

    fn decided(result: Value, verdict: Verdict) -> Self {
        Self {
            result,
            verdict: Some(verdict_label(verdict).into()),
            promise_violated: verdict == Verdict::PromiseViolated,
            csv: None,
        }
    }
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Upper => "GE",
        Verdict::Lower => "LE",
        Verdict::PromiseViolated => "promise-violated",
    }
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidParameter(format!("report serialization: {e}")))
}

/// Runs `config` without touching the file system beyond reading inputs.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutcome> {
    let started = Instant::now();
    let instance = match &config.instance {
        Some(path) => load_instance(path)?,
        None => return Err(Error::InvalidParameter("no instance file given".into())),
    };
    let kind = instance.kind();
    let output = dispatch(config, instance)?;
    let mut report = json!({
        "schema": SCHEMA_VERSION,
        "subcommand": config.task.name(),
        "config": config,
        "instance-kind": kind,
        "verdict": output.verdict,
        "result": output.result,
    });
    if config.timings {
        report["timings"] = json!({ "seconds": started.elapsed().as_secs_f64() });
    }
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidParameter(format!("report serialization: {e}")))?;
    text.push('\n');
    if config.csv.is_some() && output.csv.is_none() {
        return Err(Error::InvalidParameter(format!(
            "subcommand `{}` does not produce CSV",
            config.task.name()
        )));
    }
    Ok(RunOutcome {
        report: text,
        csv: output.csv,
        exit_code: if output.promise_violated {
            EXIT_PROMISE_VIOLATED
        } else {
            EXIT_OK
        },
    })
}

/// [`execute`], then writes the report and CSV where the config asks.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let outcome = execute(config)?;
    if let Some(path) = &config.output {
        std::fs::write(path, &outcome.report)?;
    }
    if let (Some(path), Some(csv)) = (&config.csv, &outcome.csv) {
        std::fs::write(path, csv)?;
    }
    Ok(outcome)
}

fn dispatch(config: &ExperimentConfig, instance: Instance) -> Result<TaskOutput> {
    match &config.task {
        Task::Spectral {
            j,
            gate_set,
            mark,
            lowering,
        } => spectral(instance, *j, *gate_set, *mark, *lowering),
        Task::DiagEntry { .. } => diag_entry(config, instance),
        Task::Paths { .. } => paths(config, instance),
        Task::Walk { .. } => walk(config, instance),
        Task::Witness { .. } => witness(config, instance),
        Task::Reduce { j, m, gate_set, mark } => {
            let (a, default_j) = match instance {
                Instance::Matrix(m) => (SignedSparseMatrix::new(m)?, 0),
                Instance::Circuit(y) => {
                    let u = build_u_circuit_with(&y, *gate_set, *mark)?;
                    let clock = build_clock_hermitian_with(&u, Lowering::Folded)?;
                    (SignedSparseMatrix::new(clock.a_matrix().clone())?, clock.start_index())
                }
                Instance::Graph(_) => return Err(wrong_kind("reduce", "symmetric or circuit")),
            };
            let j = j.unwrap_or(default_j);
            let identity = verify_reduction_identity(&a, j, *m)?;
            let gadget = a.to_gadget();
            let (lhs, rhs) = psi_minus_moment(&gadget, identity.q, identity.r, *m)?;
            if lhs != rhs {
                return Err(Error::IdentityFailure(format!("2⟨ψ⁻|Ã^m|ψ⁻⟩ = {lhs} but 2Δ = {rhs}")));
            }
            Ok(TaskOutput::plain(json!({
                "identity": to_value(&identity)?,
                "direct-sum": to_value(&direct_sum_check(&a)?)?,
                "psi-minus-moment-doubled": lhs as f64,
            })))
        }
        Task::Verify { gate_set } => {
            let Instance::Circuit(y) = instance else {
                return Err(wrong_kind("verify", "circuit"));
            };
            let report = verify_decay_reduction(&y, *gate_set)?;
            let mut out = TaskOutput::plain(to_value(&report)?);
            out.csv = Some(decay_csv(&report.samples));
            Ok(out)
        }
    }
}

fn wrong_kind(task: &str, expected: &str) -> Error {
    Error::InvalidParameter(format!("`{task}` needs a {expected} instance"))
}

fn measure_csv(measure: &SpectralMeasure) -> String {
    let mut csv = String::from("x,probability\n");
    for a in measure.atoms() {
        writeln!(csv, "{},{}", a.value, a.weight).expect("writing to a String");
    }
    csv
}

fn decay_csv(samples: &[DecaySample]) -> String {
    let mut csv = String::from("t,c_exact,lower_envelope,upper_envelope\n");
    for s in samples {
        writeln!(csv, "{},{},{},{}", s.t, s.c_exact, s.lower_envelope, s.upper_envelope).expect("writing to a String");
    }
    csv
}

fn check_index(j: usize, n: usize) -> Result<()> {
    if j >= n {
        return Err(Error::InvalidParameter(format!(
            "index {j} out of range for dimension {n}"
        )));
    }
    Ok(())
}

fn spectral(
    instance: Instance,
    j: Option<usize>,
    gate_set: crate::circuits::GateSet,
    mark: crate::circuits::PhaseMark,
    lowering: Lowering,
) -> Result<TaskOutput> {
    let mut result = serde_json::Map::new();
    let (dense, j) = match instance {
        Instance::Matrix(m) => (m.materialize()?, j.unwrap_or(0)),
        Instance::Graph(g) => (adjacency_matrix(&g)?, j.unwrap_or(0)),
        Instance::Circuit(y) => {
            let u = build_u_circuit_with(&y, gate_set, mark)?;
            let clock = build_clock_hermitian_with(&u, lowering)?;
            let start = clock.start_index();
            let j = j.unwrap_or(start);
            let alpha1_sq = y.acceptance_probability()?;
            result.insert("clock-size".into(), json!(clock.clock_size()));
            result.insert("alpha1-sq".into(), json!(alpha1_sq));
            result.insert("scale".into(), json!(CLOCK_SCALE));
            result.insert("row-violations".into(), json!(clock.row_violations().len()));
            let dense = clock.a_matrix().materialize()?;
            if j == start {
                let analytic = clock_measure(clock.clock_size(), alpha1_sq, mark)?
                    .measure()
                    .pruned(0.0)
                    .scaled(CLOCK_SCALE);
                check_index(j, dense.dimension())?;
                let numeric = project_state(&eig(&dense)?, &basis_vector(dense.dimension(), j))?;
                result.insert("comparison".into(), to_value(&numeric.compare(&analytic, 1e-12))?);
                result.insert("analytic".into(), to_value(&analytic)?);
            }
            (dense, j)
        }
    };
    check_index(j, dense.dimension())?;
    let measure = project_state(&eig(&dense)?, &basis_vector(dense.dimension(), j))?;
    result.insert("dimension".into(), json!(dense.dimension()));
    result.insert("j".into(), json!(j));
    result.insert("measure".into(), to_value(&measure)?);
    let mut out = TaskOutput::plain(Value::Object(result));
    out.csv = Some(measure_csv(&measure));
    Ok(out)
}

fn diag_entry(config: &ExperimentConfig, instance: Instance) -> Result<TaskOutput> {
    let Task::DiagEntry {
        j,
        m,
        epsilon,
        delta,
        repetitions_override,
        gate_set,
        mark,
        lowering,
    } = &config.task
    else {
        unreachable!("dispatched on the task");
    };
    let (dense, beta, j): (DenseHermitian, f64, usize) = match instance {
        Instance::Matrix(a) => {
            let dense = a.materialize()?;
            let beta = dense.gershgorin_bound();
            (dense, beta, j.unwrap_or(0))
        }
        Instance::Graph(g) => (adjacency_matrix(&g)?, g.degree() as f64, j.unwrap_or(0)),
        Instance::Circuit(y) => {
            let u = build_u_circuit_with(&y, *gate_set, *mark)?;
            let clock = build_clock_hermitian_with(&u, *lowering)?;
            (
                clock.a_matrix().materialize()?,
                CLOCK_SCALE,
                j.unwrap_or(clock.start_index()),
            )
        }
    };
    check_index(j, dense.dimension())?;
    let e_j = basis_vector(dense.dimension(), j);
    let result = match config.method()? {
        crate::Method::Exact => {
            let power = matrix_power(&dense, *m)?;
            let moment = project_state(&eig(&dense)?, &e_j)?.moment(*m);
            json!({ "j": j, "m": m, "exact": power.re(j, j), "spectral-moment": moment })
        }
        crate::Method::QuantumSim { alpha, seed } => {
            if beta <= 0.0 {
                return Err(Error::InvalidParameter("matrix is zero".into()));
            }
            let f = FunctionDescriptor::power(*m, 1.0)?;
            let opts = EstimateOptions {
                epsilon: *epsilon,
                alpha,
                delta: *delta,
                seed,
                repetitions_override: *repetitions_override,
                perturbation: None,
            };
            let est = estimate_expectation(&dense.scaled(1.0 / beta), &e_j, &f, &opts)?;
            let scale = beta.powi(*m as i32);
            json!({
                "j": j,
                "m": m,
                "beta": beta,
                "estimate": est.estimate * scale,
                "error-bound": est.plan.error_budget * scale,
                "sample-count": est.sample_count,
                "plan": to_value(&est.plan)?,
            })
        }
    };
    Ok(TaskOutput::plain(result))
}

fn graph_of(instance: Instance, task: &str) -> Result<Arc<dyn AdjacencyOracle>> {
    match instance {
        Instance::Graph(g) => Ok(Arc::new(g)),
        _ => Err(wrong_kind(task, "graph")),
    }
}

fn paths(config: &ExperimentConfig, instance: Instance) -> Result<TaskOutput> {
    let Task::Paths {
        q,
        r,
        m,
        g,
        epsilon,
        b,
        perm,
    } = &config.task
    else {
        unreachable!("dispatched on the task");
    };
    let inst = PathDifferenceInstance {
        graph: graph_of(instance, "paths")?,
        q: *q,
        r: *r,
        m: *m,
        g: *g,
        epsilon: *epsilon,
        growth_bound: *b,
        automorphism: perm.as_deref().map(load_permutation).transpose()?,
    };
    let decision = decide_path_difference(&inst, config.method()?)?;
    Ok(TaskOutput::decided(to_value(&decision)?, decision.verdict))
}

fn walk(config: &ExperimentConfig, instance: Instance) -> Result<TaskOutput> {
    let Task::Walk {
        q,
        r,
        t_query,
        mu,
        a,
        b,
        t,
        sweep,
        norm_bound,
        perm,
    } = &config.task
    else {
        unreachable!("dispatched on the task");
    };
    let mut inst = WalkInstance::new(graph_of(instance, "walk")?, *q, *r, *mu, *a, *b, *t_query);
    inst.norm_bound = *norm_bound;
    inst.automorphism = perm.as_deref().map(load_permutation).transpose()?;
    inst.validate()?;
    inst.exchanging_automorphism()?;
    let spectrum = WalkSpectrum::new(inst.graph.as_ref())?;
    let decision = decide_decay_with(&spectrum, &inst, config.method()?)?;
    let at = spectrum.sweep(*q, *r, t)?;
    let mut out = TaskOutput::decided(
        json!({ "decision": to_value(&decision)?, "c-at": to_value(&at)? }),
        decision.verdict,
    );
    if let Some(s) = sweep {
        let rows = spectrum.sweep(*q, *r, &sweep_times(s.t0, s.t1, s.steps)?)?;
        out.csv = Some(decay_csv(&rows));
    }
    Ok(out)
}

fn witness(config: &ExperimentConfig, instance: Instance) -> Result<TaskOutput> {
    let Task::Witness {
        n_tilde,
        mu,
        a,
        b,
        t_query,
        witness_wires,
        gate_set,
        norm_bound,
    } = &config.task
    else {
        unreachable!("dispatched on the task");
    };
    let (inst, construction) = match instance {
        Instance::Graph(g) => {
            let need = |v: &Option<f64>, name: &str| {
                v.ok_or_else(|| Error::InvalidParameter(format!("graph witness instances need `{name}`")))
            };
            let inst = WitnessInstance {
                graph: Arc::new(g),
                n_tilde: n_tilde
                    .ok_or_else(|| Error::InvalidParameter("graph witness instances need `n-tilde`".into()))?,
                mu: need(mu, "mu")?,
                a: need(a, "a")?,
                b: need(b, "b")?,
                t_query: need(t_query, "T")?,
                norm_bound: *norm_bound,
            };
            (inst, None)
        }
        Instance::Circuit(y) => {
            let family = WitnessFamily::new(y, witness_wires.clone(), *gate_set)?;
            let built = build_witness_instance(&family)?;
            let mut inst = built.instance.clone();
            if let Some(n) = n_tilde {
                inst.n_tilde = *n;
            }
            inst.mu = mu.unwrap_or(inst.mu);
            inst.a = a.unwrap_or(inst.a);
            inst.b = b.unwrap_or(inst.b);
            inst.t_query = t_query.unwrap_or(inst.t_query);
            inst.norm_bound = *norm_bound;
            (inst, Some(built.summary()))
        }
        Instance::Matrix(_) => return Err(wrong_kind("witness", "graph or circuit")),
    };
    inst.validate()?;
    let decision = decide_witness(&inst, config.method()?)?;
    let (label, violated) = match decision.verdict {
        WitnessVerdict::Exists { j } => (format!("EXISTS({j})"), false),
        WitnessVerdict::None => ("NONE".to_string(), false),
        WitnessVerdict::PromiseViolated => ("promise-violated".to_string(), true),
    };
    let mut csv = String::from("j,c,estimate,verdict\n");
    for p in &decision.pairs {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{}",
            p.j,
            fmt(p.decision.c),
            fmt(p.decision.estimate),
            verdict_label(p.decision.verdict)
        )
        .expect("writing to a String");
    }
    Ok(TaskOutput {
        result: json!({
            "n-tilde": inst.n_tilde,
            "mu": inst.mu,
            "a": inst.a,
            "b": inst.b,
            "T": inst.t_query,
            "construction": to_value(&construction)?,
            "decision": to_value(&decision)?,
        }),
        verdict: Some(label),
        promise_violated: violated,
        csv: Some(csv),
    })
}
