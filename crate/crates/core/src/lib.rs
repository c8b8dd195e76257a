//! Resilient continuous-time consensus on switched directed networks.
//!
//! The crate simulates integrator agents that run either the plain linear
//! consensus protocol or ARC-P with a fractional removal parameter f, under
//! crash, malicious, and Byzantine adversaries, and computes the exact
//! fractional graph properties (edge reachability, robustness, locality)
//! that predict whether the normal agents reach agreement while staying in
//! their initial interval.
//!
//! Module map:
//! - [`frac`]: exact rationals for f and p.
//! - [`graph`]: digraphs, node sets, switching signals.
//! - [`robustness`]: fractional reachability / robustness / locality.
//! - [`protocol`]: the sorted-removal filter and the rate laws.
//! - [`adversary`]: omniscient adversary strategies.
//! - [`scenario`]: configuration schema, validation, file I/O.
//! - [`sim`]: the RK4 switched-system integrator and runtime monitors.
//! - [`export`]: deterministic CSV / JSON / gnuplot emission.

pub mod adversary;
pub mod export;
pub mod frac;
pub mod graph;
pub mod protocol;
pub mod robustness;
pub mod scenario;
pub mod sim;

pub use adversary::{
    byzantine_output, crash_output, malicious_output, AdversaryError, AdversaryOutput,
    ByzantineStrategy, CrashBehavior, MaliciousStrategy, OmniscientView, PerReceiverStrategy,
};
pub use export::{
    build_run_summary, gnuplot_script, summary_to_json, trajectory_to_csv, trajectory_to_dat,
    RunSummary,
};
pub use frac::{Fraction, FractionError};
pub use graph::{Digraph, GraphError, NodeSet, ScheduleError, SwitchingSignal};
pub use protocol::{
    arcp_rate, filter_values, lcp_rate, removal_count, FilterResult, Incoming, ProtocolError,
    WeightPolicy,
};
pub use robustness::{
    edge_reachability_fraction, find_normal_witness, is_f_fraction_local,
    is_p_fraction_edge_reachable, is_p_fraction_robust, max_fraction_robustness, LocalityVerdict,
    RobustnessVerdict, SUBSET_ENUMERATION_CAP,
};
pub use scenario::{
    graph_from_file_json, graph_to_file_json, load_graph_file, load_scenario, save_graph_file,
    save_scenario, AdversaryAssignment, AdversaryModel, EdgeWeight, IntegrationConfig,
    ProtocolKind, ResolvedScenario, ScenarioConfig, ScenarioError, ScheduleConfig, ScheduleEntry,
    WeightsConfig, GRAPH_SCHEMA_VERSION, SCENARIO_SCHEMA_VERSION,
};
pub use sim::{
    check_monotone, run_scenario, MetricsSample, RunVerdicts, SimError, SimState, Simulator,
    TrajectoryLog, ViolationKind, ViolationRecord,
};
