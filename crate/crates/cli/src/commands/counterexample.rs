//! Non-convergence scenario generation for graphs that are not f-fraction
//! robust.
//!
//! Given a witness pair (S1, S2) with neither side f-fraction edge reachable,
//! pinning S1 at a = 0 and S2 at b = 1 (everyone else at 1/2) makes every
//! member's filter discard all outside values, so the pair holds its values
//! forever and Ψ never drops below b − a. Declared adversary nodes become
//! crash adversaries that never crash, which is indistinguishable from
//! normal behavior.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use arcp_core::{
    build_run_summary, find_normal_witness, is_f_fraction_local, is_p_fraction_robust,
    load_graph_file, max_fraction_robustness, run_scenario, save_scenario, summary_to_json,
    AdversaryAssignment, AdversaryModel, CrashBehavior, Digraph, Fraction, IntegrationConfig,
    NodeSet, ProtocolKind, RunSummary, ScenarioConfig, ScheduleConfig, ScheduleEntry,
    WeightsConfig, SCENARIO_SCHEMA_VERSION,
};

use crate::CliError;

/// Ψ must stay within this much of b − a over the whole horizon; the pinned
/// rates are identically zero, so this only absorbs float dust.
pub const PSI_PIN_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct CounterexampleOutput {
    pub witness: (NodeSet, NodeSet),
    pub scenario: ScenarioConfig,
    pub scenario_path: PathBuf,
    pub summary_path: PathBuf,
    pub summary: RunSummary,
    pub psi_final: f64,
    pub psi_min: f64,
    /// Ψ ≥ (b − a) − tolerance held for the whole horizon.
    pub pinned: bool,
    pub exit_code: i32,
}

impl CounterexampleOutput {
    pub fn render(&self) -> String {
        format!(
            "witness: S1 = {} / S2 = {}\npinned: {} (psi_min = {}, psi_final = {})\nconverged: {}\nwrote {}\nwrote {}\n",
            self.witness.0,
            self.witness.1,
            self.pinned,
            self.psi_min,
            self.psi_final,
            self.summary.converged,
            self.scenario_path.display(),
            self.summary_path.display(),
        )
    }
}

fn initial_value_for(node: u32, s1: &NodeSet, s2: &NodeSet) -> f64 {
    if s1.contains(node) {
        0.0
    } else if s2.contains(node) {
        1.0
    } else {
        0.5
    }
}

/// Builds the pinning scenario for a verified witness pair.
pub fn pinning_scenario(
    graph: &Digraph,
    f: Fraction,
    s1: &NodeSet,
    s2: &NodeSet,
) -> ScenarioConfig {
    let initial_states: Vec<f64> = graph
        .normal_nodes()
        .map(|i| initial_value_for(i, s1, s2))
        .collect();
    let adversaries: Vec<AdversaryAssignment> = graph
        .adversary_nodes()
        .map(|node| AdversaryAssignment {
            node,
            model: AdversaryModel::Crash(CrashBehavior {
                crash_time: None,
                fault_value: None,
                initial_value: initial_value_for(node, s1, s2),
            }),
        })
        .collect();
    let adversary_set: NodeSet = graph.adversary_nodes().collect();
    let enforce_f_local =
        is_f_fraction_local(std::slice::from_ref(graph), &adversary_set, f).holds();
    ScenarioConfig {
        schema_version: SCENARIO_SCHEMA_VERSION,
        topologies: BTreeMap::from([("g".to_string(), graph.clone())]),
        schedule: ScheduleConfig {
            dwell: None,
            entries: vec![ScheduleEntry { t: 0.0, topology: "g".into() }],
        },
        protocol: ProtocolKind::Arcp,
        f,
        weights: WeightsConfig { alpha: 1.0, beta: 1.0, uniform: Some(1.0), per_edge: None },
        adversaries,
        initial_states,
        integration: IntegrationConfig {
            horizon: 50.0,
            sample_every: 50,
            ..IntegrationConfig::default()
        },
        enforce_f_local,
    }
}

pub fn counterexample_for(
    graph: &Digraph,
    f: Fraction,
    stem: &str,
    out_dir: &Path,
) -> Result<CounterexampleOutput, CliError> {
    if f > Fraction::HALF {
        return Err(CliError::Invalid(format!(
            "f = {f} lies outside the protocol's parameter range [0, 1/2]"
        )));
    }
    if is_p_fraction_robust(graph, f)?.holds() {
        let max = max_fraction_robustness(graph)?;
        return Err(CliError::Invalid(format!(
            "no counterexample exists at f = {f}: the digraph is {f}-fraction robust \
             (max fraction robustness {max})"
        )));
    }
    let Some((s1, s2)) = find_normal_witness(graph, f)? else {
        return Err(CliError::Invalid(format!(
            "the digraph is not {f}-fraction robust, but no witness pair has normal nodes \
             on both sides, so the pinning construction cannot separate normal agents"
        )));
    };

    let scenario = pinning_scenario(graph, f, &s1, &s2);
    std::fs::create_dir_all(out_dir)?;
    let scenario_path = out_dir.join(format!("{stem}_counterexample.json"));
    save_scenario(&scenario_path, &scenario)?;

    let log = run_scenario(&scenario)?;
    let summary = build_run_summary(&scenario, &log);
    let summary_path = out_dir.join(format!("{stem}_counterexample_summary.json"));
    std::fs::write(&summary_path, summary_to_json(&summary))?;

    let pinned = log.verdicts.psi_min >= 1.0 - PSI_PIN_TOL;
    Ok(CounterexampleOutput {
        witness: (s1, s2),
        scenario,
        scenario_path,
        summary_path,
        psi_final: log.verdicts.psi_final,
        psi_min: log.verdicts.psi_min,
        pinned,
        summary,
        exit_code: 0,
    })
}

pub fn counterexample(
    graph_path: &Path,
    f: Fraction,
    out_dir: &Path,
) -> Result<CounterexampleOutput, CliError> {
    let graph = load_graph_file(graph_path)?;
    let stem = graph_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("graph");
    counterexample_for(&graph, f, stem, out_dir)
}
