//! Configuration, fixtures and deterministic JSON/CSV reports behind the
//! command-line front end.
//!
//! Reports carry `"schema": 1` and the resolved config. Sampling runs derive
//! all randomness from the config seed: the estimator splits it into ChaCha8
//! streams per chunk of samples, and witness searches first draw one seed per
//! pair from stream `j`.

mod config;
mod fixture;
mod instance;
mod run;

pub use config::{ExperimentConfig, MethodKind, Sweep, Task, SCHEMA_VERSION};
pub use fixture::{generate_fixture, FixtureFile, FixtureKind};
pub use instance::{load_instance, load_permutation, read_text, Instance};
pub use run::{execute, run, RunOutcome, EXIT_ERROR, EXIT_OK, EXIT_PROMISE_VIOLATED};
