//! Library backing the `arcp` binary: the four user-facing workflows as
//! plain functions, so tests can drive them in-process.

pub mod commands;

use thiserror::Error;

pub use commands::counterexample::{
    counterexample, counterexample_for, pinning_scenario, CounterexampleOutput, PSI_PIN_TOL,
};
pub use commands::robustness::{robustness, robustness_of, PQuery, RobustnessReport, SetQuery};
pub use commands::simulate::{exit_code_for, simulate, SimulateOutput};
pub use commands::sweep::{sweep, sweep_template, SweepAxis, SweepOutput, SweepRow};

/// Converged and safe.
pub const EXIT_OK: i32 = 0;
/// Run completed but Ψ stayed at or above the consensus threshold.
pub const EXIT_NON_CONVERGED: i32 = 2;
/// A normal state left the initial interval beyond tolerance.
pub const EXIT_SAFETY_VIOLATION: i32 = 3;
/// Configuration, parse, or precondition failure.
pub const EXIT_CONFIG_ERROR: i32 = 4;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "FRAC_CONSENSUS_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] arcp_core::ScenarioError),
    #[error(transparent)]
    Sim(#[from] arcp_core::SimError),
    #[error(transparent)]
    Graph(#[from] arcp_core::GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}
