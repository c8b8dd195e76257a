//! Scenario configuration: file schema, validation, and resolution into the
//! runtime pieces the simulator consumes.
//!
//! Scenario and graph files are JSON with a `schema_version` field. Field
//! names are frozen; see `docs/file-formats.md` in the repository root.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{ByzantineStrategy, CrashBehavior, MaliciousStrategy};
use crate::frac::Fraction;
use crate::graph::{Digraph, NodeSet, ScheduleError, SwitchingSignal};
use crate::protocol::{ProtocolError, WeightPolicy};
use crate::robustness::{is_f_fraction_local, LocalityVerdict};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;
pub const GRAPH_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCENARIO_SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("scenario declares no topologies")]
    NoTopologies,
    #[error("topology {name:?} has (n, normal_count) = ({n}, {normal_count}), but {first:?} has ({first_n}, {first_normal})")]
    InconsistentTopologies {
        name: String,
        n: u32,
        normal_count: u32,
        first: String,
        first_n: u32,
        first_normal: u32,
    },
    #[error("scenario needs at least one normal node")]
    NoNormalNodes,
    #[error("schedule references unknown topology {0:?}")]
    UnknownTopology(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("weights must set exactly one of `uniform` / `per_edge`")]
    WeightsShape,
    #[error("per-edge weight ({from}, {to}) matches no edge of any topology")]
    UnknownWeightEdge { from: u32, to: u32 },
    #[error("edge ({from}, {to}) of topology {topology:?} has no weight")]
    MissingEdgeWeight { from: u32, to: u32, topology: String },
    #[error("initial_states has {found} entries, expected {expected} (one per normal node)")]
    InitialStatesLength { expected: usize, found: usize },
    #[error("initial_states[{0}] is not finite")]
    NonFiniteInitial(usize),
    #[error("adversary id {node} must lie in {normal_count}..{n}")]
    AdversaryOutOfRange { node: u32, normal_count: u32, n: u32 },
    #[error("duplicate adversary assignment for node {0}")]
    DuplicateAdversary(u32),
    #[error("adversary node {0} has no assignment")]
    UnassignedAdversary(u32),
    #[error("adversary {node}: crash_time must be a finite value ≥ 0")]
    CrashTimeInvalid { node: u32 },
    #[error("adversary {node}: strategy parameter is not finite")]
    NonFiniteStrategy { node: u32 },
    #[error("adversary {node}: receiver {receiver} is not an out-neighbor in any scheduled topology")]
    ByzantineReceiverNotNeighbor { node: u32, receiver: u32 },
    #[error("adversary {node}: no per-receiver strategy for out-neighbor {receiver}")]
    ByzantineReceiverMissing { node: u32, receiver: u32 },
    #[error("schedules with more than one entry must declare a dwell time")]
    DwellRequired,
    #[error("integration settings invalid: {0}")]
    Integration(String),
    #[error("step h = {h} exceeds the dwell time {dwell}")]
    StepExceedsDwell { h: f64, dwell: f64 },
    #[error("adversary set is not f-fraction local: node {node} of topology {topology:?} has too many adversary in-neighbors")]
    FLocalViolation { topology: String, node: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Arcp,
    Lcp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub t: f64,
    pub topology: String,
}

/// Switching schedule. `dwell` may be omitted for single-topology schedules;
/// schedules with more than one entry must declare it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell: Option<f64>,
    pub entries: Vec<ScheduleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeight {
    pub from: u32,
    pub to: u32,
    pub weight: f64,
}

/// Weight declaration: `uniform` or `per_edge`, plus the bounds α ≤ w ≤ β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsConfig {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_edge: Option<Vec<EdgeWeight>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AdversaryModel {
    Crash(CrashBehavior),
    Malicious { strategy: MaliciousStrategy },
    Byzantine { strategy: ByzantineStrategy },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryAssignment {
    pub node: u32,
    #[serde(flatten)]
    pub model: AdversaryModel,
}

fn default_h() -> f64 {
    1e-3
}
fn default_horizon() -> f64 {
    50.0
}
fn default_sample_every() -> u32 {
    10
}
fn default_eps() -> f64 {
    1e-6
}
fn default_safety_tol() -> f64 {
    1e-6
}
fn default_mono_tol() -> f64 {
    1e-9
}
fn default_rate_tol() -> f64 {
    1e-6
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: u32,
    #[serde(default = "default_eps")]
    pub eps_consensus: f64,
    #[serde(default = "default_safety_tol")]
    pub safety_tol: f64,
    #[serde(default = "default_mono_tol")]
    pub mono_tol: f64,
    #[serde(default = "default_rate_tol")]
    pub rate_tol: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            h: default_h(),
            horizon: default_horizon(),
            sample_every: default_sample_every(),
            eps_consensus: default_eps(),
            safety_tol: default_safety_tol(),
            mono_tol: default_mono_tol(),
            rate_tol: default_rate_tol(),
        }
    }
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub topologies: BTreeMap<String, Digraph>,
    pub schedule: ScheduleConfig,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub f: Fraction,
    pub weights: WeightsConfig,
    #[serde(default)]
    pub adversaries: Vec<AdversaryAssignment>,
    pub initial_states: Vec<f64>,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default = "default_true")]
    pub enforce_f_local: bool,
}

/// Scenario after name resolution and validation.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    /// Topology names in sorted order; `graphs[i]` is `names[i]`.
    pub names: Vec<String>,
    pub graphs: Vec<Digraph>,
    pub signal: SwitchingSignal,
    /// Distinct indices of topologies appearing in the schedule, ascending.
    pub scheduled: Vec<usize>,
    pub weight_policy: WeightPolicy,
    pub n: u32,
    pub normal_count: u32,
}

impl ResolvedScenario {
    pub fn scheduled_graphs(&self) -> Vec<&Digraph> {
        self.scheduled.iter().map(|i| &self.graphs[*i]).collect()
    }

    /// Out-neighbors of `node` in the union over scheduled topologies.
    pub fn scheduled_out_union(&self, node: u32) -> Vec<u32> {
        let mut set = BTreeSet::new();
        for &idx in &self.scheduled {
            set.extend(self.graphs[idx].out_neighbors(node).iter().copied());
        }
        set.into_iter().collect()
    }
}

fn check_finite_strategy(node: u32, strategy: &MaliciousStrategy) -> Result<(), ScenarioError> {
    let params: Vec<f64> = match *strategy {
        MaliciousStrategy::Constant { value } => vec![value],
        MaliciousStrategy::Ramp { start, slope } => vec![start, slope],
        MaliciousStrategy::Sinusoid { center, amplitude, freq_hz } => {
            vec![center, amplitude, freq_hz]
        }
        MaliciousStrategy::ChaseMax { offset } | MaliciousStrategy::ChaseMin { offset } => {
            vec![offset]
        }
    };
    if params.iter().any(|v| !v.is_finite()) {
        return Err(ScenarioError::NonFiniteStrategy { node });
    }
    Ok(())
}

impl ScenarioConfig {
    /// Validates the configuration and resolves topology names to indices.
    pub fn resolve(&self) -> Result<ResolvedScenario, ScenarioError> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(ScenarioError::SchemaVersion(self.schema_version));
        }
        if self.topologies.is_empty() {
            return Err(ScenarioError::NoTopologies);
        }

        let names: Vec<String> = self.topologies.keys().cloned().collect();
        let graphs: Vec<Digraph> = self.topologies.values().cloned().collect();
        let (first_n, first_normal) = (graphs[0].node_count(), graphs[0].normal_count());
        for (name, g) in self.topologies.iter() {
            if g.node_count() != first_n || g.normal_count() != first_normal {
                return Err(ScenarioError::InconsistentTopologies {
                    name: name.clone(),
                    n: g.node_count(),
                    normal_count: g.normal_count(),
                    first: names[0].clone(),
                    first_n,
                    first_normal,
                });
            }
        }
        if first_normal == 0 {
            return Err(ScenarioError::NoNormalNodes);
        }

        let mut entries = Vec::with_capacity(self.schedule.entries.len());
        for entry in &self.schedule.entries {
            let idx = names
                .binary_search(&entry.topology)
                .map_err(|_| ScenarioError::UnknownTopology(entry.topology.clone()))?;
            entries.push((entry.t, idx));
        }
        if entries.len() > 1 && self.schedule.dwell.is_none() {
            return Err(ScenarioError::DwellRequired);
        }
        let dwell = self.schedule.dwell.unwrap_or(f64::INFINITY);
        let signal = SwitchingSignal::new(entries, dwell, graphs.len())?;
        let scheduled: Vec<usize> = signal
            .entries()
            .iter()
            .map(|&(_, idx)| idx)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let weight_policy = match (&self.weights.uniform, &self.weights.per_edge) {
            (Some(w), None) => WeightPolicy::uniform(*w, self.weights.alpha, self.weights.beta)?,
            (None, Some(list)) => {
                let mut map = BTreeMap::new();
                for ew in list {
                    if !graphs.iter().any(|g| g.has_edge(ew.from, ew.to)) {
                        return Err(ScenarioError::UnknownWeightEdge {
                            from: ew.from,
                            to: ew.to,
                        });
                    }
                    map.insert((ew.from, ew.to), ew.weight);
                }
                WeightPolicy::per_edge(map, self.weights.alpha, self.weights.beta)?
            }
            _ => return Err(ScenarioError::WeightsShape),
        };

        // Adversary assignments: in range, unique, and covering every
        // declared adversary slot.
        let mut seen = BTreeSet::new();
        for adv in &self.adversaries {
            if adv.node < first_normal || adv.node >= first_n {
                return Err(ScenarioError::AdversaryOutOfRange {
                    node: adv.node,
                    normal_count: first_normal,
                    n: first_n,
                });
            }
            if !seen.insert(adv.node) {
                return Err(ScenarioError::DuplicateAdversary(adv.node));
            }
        }
        for node in first_normal..first_n {
            if !seen.contains(&node) {
                return Err(ScenarioError::UnassignedAdversary(node));
            }
        }

        let resolved = ResolvedScenario {
            names,
            graphs,
            signal,
            scheduled,
            weight_policy,
            n: first_n,
            normal_count: first_normal,
        };

        for adv in &self.adversaries {
            match &adv.model {
                AdversaryModel::Crash(crash) => {
                    if let Some(tk) = crash.crash_time {
                        if !(tk.is_finite() && tk >= 0.0) {
                            return Err(ScenarioError::CrashTimeInvalid { node: adv.node });
                        }
                    }
                    if let Some(fv) = crash.fault_value {
                        if !fv.is_finite() {
                            return Err(ScenarioError::NonFiniteStrategy { node: adv.node });
                        }
                    }
                    if !crash.initial_value.is_finite() {
                        return Err(ScenarioError::NonFiniteStrategy { node: adv.node });
                    }
                }
                AdversaryModel::Malicious { strategy } => {
                    check_finite_strategy(adv.node, strategy)?;
                }
                AdversaryModel::Byzantine { strategy } => {
                    let union = resolved.scheduled_out_union(adv.node);
                    match strategy {
                        ByzantineStrategy::Split { high, low, high_receivers } => {
                            check_finite_strategy(adv.node, high)?;
                            check_finite_strategy(adv.node, low)?;
                            for r in high_receivers.iter() {
                                if !union.contains(&r) {
                                    return Err(ScenarioError::ByzantineReceiverNotNeighbor {
                                        node: adv.node,
                                        receiver: r,
                                    });
                                }
                            }
                        }
                        ByzantineStrategy::PerReceiver { receivers } => {
                            for entry in receivers {
                                check_finite_strategy(adv.node, &entry.strategy)?;
                                if !union.contains(&entry.receiver) {
                                    return Err(ScenarioError::ByzantineReceiverNotNeighbor {
                                        node: adv.node,
                                        receiver: entry.receiver,
                                    });
                                }
                            }
                            for r in &union {
                                if !receivers.iter().any(|e| e.receiver == *r) {
                                    return Err(ScenarioError::ByzantineReceiverMissing {
                                        node: adv.node,
                                        receiver: *r,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }

        // Weight coverage: every edge into an integrated node (normal nodes
        // and crash adversaries) needs a weight in every scheduled topology.
        let crash_nodes: BTreeSet<u32> = self
            .adversaries
            .iter()
            .filter(|a| matches!(a.model, AdversaryModel::Crash(_)))
            .map(|a| a.node)
            .collect();
        for &idx in &resolved.scheduled {
            let g = &resolved.graphs[idx];
            for (from, to) in g.edges() {
                let integrated = to < first_normal || crash_nodes.contains(&to);
                if integrated && !resolved.weight_policy.covers(from, to) {
                    return Err(ScenarioError::MissingEdgeWeight {
                        from,
                        to,
                        topology: resolved.names[idx].clone(),
                    });
                }
            }
        }

        if self.initial_states.len() != first_normal as usize {
            return Err(ScenarioError::InitialStatesLength {
                expected: first_normal as usize,
                found: self.initial_states.len(),
            });
        }
        if let Some(i) = self.initial_states.iter().position(|v| !v.is_finite()) {
            return Err(ScenarioError::NonFiniteInitial(i));
        }

        let integ = &self.integration;
        if !(integ.h > 0.0 && integ.h.is_finite()) {
            return Err(ScenarioError::Integration(format!("h = {}", integ.h)));
        }
        if !(integ.horizon > 0.0 && integ.horizon.is_finite()) {
            return Err(ScenarioError::Integration(format!(
                "horizon = {}",
                integ.horizon
            )));
        }
        if integ.sample_every == 0 {
            return Err(ScenarioError::Integration("sample_every = 0".into()));
        }
        if integ.eps_consensus.is_nan() || integ.eps_consensus <= 0.0 {
            return Err(ScenarioError::Integration(format!(
                "eps_consensus = {}",
                integ.eps_consensus
            )));
        }
        for (name, tol) in [
            ("safety_tol", integ.safety_tol),
            ("mono_tol", integ.mono_tol),
            ("rate_tol", integ.rate_tol),
        ] {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(ScenarioError::Integration(format!("{name} = {tol}")));
            }
        }
        if integ.h > resolved.signal.dwell() {
            return Err(ScenarioError::StepExceedsDwell {
                h: integ.h,
                dwell: resolved.signal.dwell(),
            });
        }

        if self.protocol == ProtocolKind::Arcp && self.f > Fraction::HALF {
            return Err(ScenarioError::Protocol(
                ProtocolError::RemovalFractionRange(self.f),
            ));
        }

        if self.enforce_f_local {
            let adversary_set: NodeSet = self.adversaries.iter().map(|a| a.node).collect();
            let scheduled_graphs: Vec<Digraph> = resolved
                .scheduled
                .iter()
                .map(|i| resolved.graphs[*i].clone())
                .collect();
            if let LocalityVerdict::NotLocal { topology, node } =
                is_f_fraction_local(&scheduled_graphs, &adversary_set, self.f)
            {
                return Err(ScenarioError::FLocalViolation {
                    topology: resolved.names[resolved.scheduled[topology]].clone(),
                    node,
                });
            }
        }

        Ok(resolved)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_json(&text)
}

pub fn save_scenario(path: impl AsRef<Path>, cfg: &ScenarioConfig) -> Result<(), ScenarioError> {
    Ok(std::fs::write(path, cfg.to_json())?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFileDto {
    schema_version: u32,
    #[serde(flatten)]
    graph: Digraph,
}

pub fn graph_to_file_json(graph: &Digraph) -> String {
    let dto = GraphFileDto {
        schema_version: GRAPH_SCHEMA_VERSION,
        graph: graph.clone(),
    };
    let mut text = serde_json::to_string_pretty(&dto).expect("graph serializes");
    text.push('\n');
    text
}

pub fn graph_from_file_json(text: &str) -> Result<Digraph, ScenarioError> {
    let dto: GraphFileDto = serde_json::from_str(text)?;
    if dto.schema_version != GRAPH_SCHEMA_VERSION {
        return Err(ScenarioError::SchemaVersion(dto.schema_version));
    }
    Ok(dto.graph)
}

pub fn load_graph_file(path: impl AsRef<Path>) -> Result<Digraph, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    graph_from_file_json(&text)
}

pub fn save_graph_file(path: impl AsRef<Path>, graph: &Digraph) -> Result<(), ScenarioError> {
    Ok(std::fs::write(path, graph_to_file_json(graph))?)
}
