//! `specwalk`: run decision problems and verification suites on instance
//! files and write deterministic JSON/CSV reports.
//!
//! Exit status: 0 when a decision is reached (or a check passes), 2 when the
//! instance violates its promise, 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use specwalk::circuits::{GateCircuit, GateSet, Lowering, PhaseMark};
use specwalk::experiment::{
    generate_fixture, read_text, run, ExperimentConfig, FixtureKind, MethodKind, Sweep, Task, EXIT_ERROR,
};
use specwalk::walks::NormBound;

#[derive(Parser)]
#[command(
    name = "specwalk",
    version,
    about = "Spectral measures, clock circuits and random-walk decision problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Instance file (`symmetric`, `graph` or `circuit` header).
    instance: PathBuf,
    #[arg(long, default_value = "exact", value_parser = method_kind)]
    method: MethodKind,
    /// Failure probability of the sampling route.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Include wall-clock timings (reports are then not reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Clone, Copy)]
struct CircuitKnobs {
    #[arg(long, default_value = "universal", value_parser = gate_set)]
    gate_set: GateSet,
    #[arg(long, default_value = "one", value_parser = phase_mark)]
    mark: PhaseMark,
    #[arg(long, default_value = "literal", value_parser = lowering)]
    lowering: Lowering,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral measure of a basis state; closed-form comparison for circuits.
    Spectral {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        j: Option<usize>,
        #[command(flatten)]
        circuit: CircuitKnobs,
    },
    /// The diagonal entry (A^m)_jj.
    DiagEntry {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long)]
        repetitions_override: Option<u64>,
        #[command(flatten)]
        circuit: CircuitKnobs,
    },
    /// Difference of numbers of paths between q and r.
    Paths {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        g: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        b: f64,
        /// Automorphism exchanging q and r (`perm` file).
        #[arg(long)]
        perm: Option<PathBuf>,
    },
    /// Decay of probability differences c_qr(T).
    Walk {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Query time T.
        #[arg(long = "T")]
        t_query: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Extra times at which c(t) is reported.
        #[arg(long = "t")]
        t: Vec<f64>,
        /// `t0:t1:steps`, written to the CSV output.
        #[arg(long)]
        sweep: Option<Sweep>,
        #[arg(long, default_value = "degree", value_parser = norm_bound)]
        norm_bound: NormBound,
        #[arg(long)]
        perm: Option<PathBuf>,
    },
    /// Search paired vertices for a slowly decaying pair.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_tilde: Option<usize>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long = "T")]
        t_query: Option<f64>,
        /// Witness wires of a verifier circuit, comma separated.
        #[arg(long, value_delimiter = ',')]
        witness_wires: Vec<usize>,
        #[arg(long, default_value = "universal", value_parser = gate_set)]
        gate_set: GateSet,
        #[arg(long, default_value = "degree", value_parser = norm_bound)]
        norm_bound: NormBound,
    },
    /// Check (A^n)_jj = Δ^(n) on the gadget graph for n ≤ m.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value = "universal", value_parser = gate_set)]
        gate_set: GateSet,
        #[arg(long, default_value = "one", value_parser = phase_mark)]
        mark: PhaseMark,
    },
    /// Circuit → clock → gadget → walk checks with decay envelopes.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "universal", value_parser = gate_set)]
        gate_set: GateSet,
    },
    /// Run a JSON experiment config.
    Run { config: PathBuf },
    /// Write instance files into a directory.
    Fixture {
        #[command(subcommand)]
        kind: FixtureCommand,
        /// Output directory.
        #[arg(long, global = true, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FixtureCommand {
    KComplete {
        #[arg(long)]
        n: usize,
    },
    Cycle {
        #[arg(long)]
        n: usize,
    },
    RandomRegular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Folded clock of a circuit: matrix, gadget graph, pairing and start pair.
    Clock {
        circuit: PathBuf,
        #[arg(long, default_value = "universal", value_parser = gate_set)]
        gate_set: GateSet,
        #[arg(long, default_value = "one", value_parser = phase_mark)]
        mark: PhaseMark,
    },
}

fn kebab(s: &str) -> serde_json::Value {
    json!(s)
}

fn method_kind(s: &str) -> Result<MethodKind, String> {
    serde_json::from_value(kebab(s)).map_err(|_| format!("expected `exact` or `quantum-sim`, got `{s}`"))
}

fn gate_set(s: &str) -> Result<GateSet, String> {
    serde_json::from_value(kebab(s)).map_err(|_| format!("expected `universal` or `with-classical`, got `{s}`"))
}

fn phase_mark(s: &str) -> Result<PhaseMark, String> {
    serde_json::from_value(kebab(s)).map_err(|_| format!("expected `one` or `zero`, got `{s}`"))
}

fn lowering(s: &str) -> Result<Lowering, String> {
    serde_json::from_value(kebab(s)).map_err(|_| format!("expected `literal` or `folded`, got `{s}`"))
}

fn norm_bound(s: &str) -> Result<NormBound, String> {
    serde_json::from_value(kebab(s)).map_err(|_| format!("expected `degree` or `gershgorin`, got `{s}`"))
}

fn config(common: Common, task: Task) -> ExperimentConfig {
    ExperimentConfig {
        task,
        instance: Some(common.instance),
        method: common.method,
        alpha: common.alpha,
        seed: common.seed,
        output: common.output,
        csv: common.csv,
        timings: common.timings,
    }
}

fn experiment(command: Command) -> Result<ExperimentConfig> {
    Ok(match command {
        Command::Spectral { common, j, circuit } => config(
            common,
            Task::Spectral {
                j,
                gate_set: circuit.gate_set,
                mark: circuit.mark,
                lowering: circuit.lowering,
            },
        ),
        Command::DiagEntry {
            common,
            j,
            m,
            epsilon,
            delta,
            repetitions_override,
            circuit,
        } => config(
            common,
            Task::DiagEntry {
                j,
                m,
                epsilon,
                delta,
                repetitions_override,
                gate_set: circuit.gate_set,
                mark: circuit.mark,
                lowering: circuit.lowering,
            },
        ),
        Command::Paths {
            common,
            q,
            r,
            m,
            g,
            epsilon,
            b,
            perm,
        } => config(
            common,
            Task::Paths {
                q,
                r,
                m,
                g,
                epsilon,
                b,
                perm,
            },
        ),
        Command::Walk {
            common,
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
        } => config(
            common,
            Task::Walk {
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
            },
        ),
        Command::Witness {
            common,
            n_tilde,
            mu,
            a,
            b,
            t_query,
            witness_wires,
            gate_set,
            norm_bound,
        } => config(
            common,
            Task::Witness {
                n_tilde,
                mu,
                a,
                b,
                t_query,
                witness_wires,
                gate_set,
                norm_bound,
            },
        ),
        Command::Reduce {
            common,
            j,
            m,
            gate_set,
            mark,
        } => config(common, Task::Reduce { j, m, gate_set, mark }),
        Command::Verify { common, gate_set } => config(common, Task::Verify { gate_set }),
        Command::Run { config } => {
            let text = read_text(&config)?;
            ExperimentConfig::from_json(&text).with_context(|| format!("reading {}", config.display()))?
        }
        Command::Fixture { .. } => unreachable!("handled before"),
    })
}

fn fixture(kind: FixtureCommand, out: &Path) -> Result<()> {
    let kind = match kind {
        FixtureCommand::KComplete { n } => FixtureKind::KComplete { n },
        FixtureCommand::Cycle { n } => FixtureKind::Cycle { n },
        FixtureCommand::RandomRegular { n, d, seed } => FixtureKind::RandomRegular { n, d, seed },
        FixtureCommand::Clock {
            circuit,
            gate_set,
            mark,
        } => FixtureKind::Clock {
            circuit: GateCircuit::parse(&read_text(&circuit)?)?,
            gate_set,
            mark,
        },
    };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for file in generate_fixture(&kind)? {
        let path = out.join(&file.name);
        std::fs::write(&path, file.contents).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<u8> {
    if let Command::Fixture { kind, out } = cli.command {
        fixture(kind, &out)?;
        return Ok(0);
    }
    let config = experiment(cli.command)?;
    let outcome = run(&config)?;
    if config.output.is_none() {
        print!("{}", outcome.report);
    }
    Ok(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
