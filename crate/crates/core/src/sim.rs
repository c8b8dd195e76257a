//! Switched-system integrator for the normal-agent dynamics, with runtime
//! monitors for safety, extremal monotonicity, and the rate bound.
//!
//! Normal agents (and crash adversaries before their crash time) are advanced
//! by classical fixed-step RK4. Every stage re-evaluates the adversary
//! outputs and the ARC-P filter at the stage time and stage state, so the
//! state-dependent switching induced by the filter is resolved per stage.
//! Steps are split exactly at topology switches, crash times, and fault-ramp
//! ends; within a step the right-hand side is treated as smooth, using the
//! active piece's own extension at the step boundary.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::adversary::{AdversaryError, ByzantineStrategy, CrashBehavior, MaliciousStrategy, OmniscientView};
use crate::protocol::{arcp_rate, filter_values, removal_count, Incoming, ProtocolError};
use crate::scenario::{AdversaryModel, ProtocolKind, ResolvedScenario, ScenarioConfig, ScenarioError};

/// Cap on stored violation records; the verdict booleans always reflect the
/// full run.
const MAX_RECORDED_VIOLATIONS: usize = 100;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("state of node {node} became non-finite at t = {t}")]
    NonFinite { t: f64, node: u32 },
    #[error("step from t = {t} with h = {h} crosses the switch at t = {switch}")]
    CrossesSwitch { t: f64, h: f64, switch: f64 },
    #[error("step size {h} must be positive, finite, and at most the dwell time")]
    BadStepSize { h: f64 },
}

/// Instantaneous simulator state: normal states plus the integrated
/// pre-crash states of crash adversaries (node-ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub normal: Vec<f64>,
    pub crash: Vec<f64>,
    pub topology_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSample {
    pub max_normal: f64,
    pub min_normal: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationKind {
    /// Normal state left the initial interval beyond tolerance.
    Safety { value: f64 },
    /// Running max increased / running min decreased beyond tolerance.
    MonotoneMax { value: f64, previous: f64 },
    MonotoneMin { value: f64, previous: f64 },
    /// Observed instantaneous rate outside the B(m − x) .. B(M − x) band.
    RateBound { rate: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationRecord {
    pub t: f64,
    /// Offending node, or None for the network-wide extremal monitors.
    pub node: Option<u32>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunVerdicts {
    pub converged: bool,
    pub consensus_value: Option<f64>,
    pub psi_final: f64,
    pub psi_min: f64,
    pub safety_ok: bool,
    pub monotone_ok: bool,
    pub rate_bound_ok: bool,
    /// I_0 = [min, max] of the initial normal states.
    pub initial_interval: (f64, f64),
    /// B = beta · (n − 1 − min F_i) over normal nodes and scheduled topologies.
    pub rate_bound: f64,
    pub violations: Vec<ViolationRecord>,
}

/// Time series of one run. All per-sample vectors share the `times` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub times: Vec<f64>,
    pub topology: Vec<usize>,
    /// Per sample: the N normal states.
    pub normal_states: Vec<Vec<f64>>,
    /// Column ids for `adversary_values`: (adversary, receiver), ordered.
    pub adversary_columns: Vec<(u32, u32)>,
    pub adversary_values: Vec<Vec<f64>>,
    /// Per sample, per normal node: sender ids removed by the filter.
    pub removed: Vec<Vec<BTreeSet<u32>>>,
    pub metrics: Vec<MetricsSample>,
    pub verdicts: RunVerdicts,
}

impl TrajectoryLog {
    pub fn normal_count(&self) -> usize {
        self.normal_states.first().map_or(0, Vec::len)
    }

    pub fn final_normal_states(&self) -> &[f64] {
        self.normal_states.last().expect("log has at least one sample")
    }
}

/// True iff the sampled max series is nonincreasing and the min series
/// nondecreasing, within `tol` per consecutive pair.
pub fn check_monotone(log: &TrajectoryLog, tol: f64) -> bool {
    log.metrics.windows(2).all(|w| {
        w[1].max_normal <= w[0].max_normal + tol && w[1].min_normal >= w[0].min_normal - tol
    })
}

enum AdvKind {
    Crash { slot: usize, behavior: CrashBehavior },
    Malicious(MaliciousStrategy),
    Byzantine(ByzantineStrategy),
}

pub struct Simulator<'a> {
    cfg: &'a ScenarioConfig,
    resolved: ResolvedScenario,
    /// (node id, runtime behavior), node-ascending.
    adversaries: Vec<(u32, AdvKind)>,
    crash_initials: Vec<f64>,
    /// Integrated node ids: the normal nodes followed by crash adversaries.
    integrated: Vec<u32>,
}

impl<'a> Simulator<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Result<Self, ScenarioError> {
        let resolved = cfg.resolve()?;
        let mut assignments: Vec<&crate::scenario::AdversaryAssignment> =
            cfg.adversaries.iter().collect();
        assignments.sort_by_key(|a| a.node);

        let mut adversaries = Vec::new();
        let mut crash_initials = Vec::new();
        for assignment in assignments {
            let kind = match &assignment.model {
                AdversaryModel::Crash(behavior) => {
                    let slot = crash_initials.len();
                    crash_initials.push(behavior.initial_value);
                    AdvKind::Crash { slot, behavior: behavior.clone() }
                }
                AdversaryModel::Malicious { strategy } => AdvKind::Malicious(strategy.clone()),
                AdversaryModel::Byzantine { strategy } => AdvKind::Byzantine(strategy.clone()),
            };
            adversaries.push((assignment.node, kind));
        }

        let mut integrated: Vec<u32> = resolved.normal_nodes().collect();
        for (node, kind) in &adversaries {
            if matches!(kind, AdvKind::Crash { .. }) {
                integrated.push(*node);
            }
        }

        Ok(Simulator { cfg, resolved, adversaries, crash_initials, integrated })
    }

    pub fn resolved(&self) -> &ResolvedScenario {
        &self.resolved
    }

    pub fn initial_state(&self) -> SimState {
        SimState {
            t: 0.0,
            normal: self.cfg.initial_states.clone(),
            crash: self.crash_initials.clone(),
            topology_index: self.resolved.signal.topology_at(0.0),
        }
    }

    fn normal_count(&self) -> usize {
        self.resolved.normal_count as usize
    }

    fn view<'y>(&'y self, t: f64, y: &'y [f64], topo: usize) -> OmniscientView<'y> {
        OmniscientView {
            t,
            normal_states: &y[..self.normal_count()],
            topology: &self.resolved.graphs[topo],
            step_h: self.cfg.integration.h,
        }
    }

    /// Value adversary `adv` intends for `receiver` at (t, y).
    fn intended_value(
        &self,
        topo: usize,
        t: f64,
        y: &[f64],
        adv: u32,
        receiver: u32,
    ) -> Result<f64, SimError> {
        let view = self.view(t, y, topo);
        let (_, kind) = self
            .adversaries
            .iter()
            .find(|(node, _)| *node == adv)
            .expect("adversary lookup follows validated assignments");
        Ok(match kind {
            AdvKind::Crash { slot, behavior } => {
                behavior.broadcast(t, y[self.normal_count() + slot], view.step_h)
            }
            AdvKind::Malicious(strategy) => strategy.value(&view),
            AdvKind::Byzantine(strategy) => strategy.value_for(&view, adv, receiver)?,
        })
    }

    /// Values conveyed to `node` at (t, y) under the active topology.
    fn incoming_for(
        &self,
        topo: usize,
        t: f64,
        y: &[f64],
        node: u32,
        own: f64,
    ) -> Result<Incoming, SimError> {
        let graph = &self.resolved.graphs[topo];
        let nc = self.normal_count();
        let mut values = Vec::with_capacity(graph.in_degree(node));
        for &j in graph.in_neighbors(node) {
            let value = if (j as usize) < nc {
                y[j as usize]
            } else {
                self.intended_value(topo, t, y, j, node)?
            };
            values.push((j, value));
        }
        Ok(Incoming::new(node, own, values))
    }

    fn budget(&self, topo: usize, node: u32) -> Result<usize, ProtocolError> {
        match self.cfg.protocol {
            ProtocolKind::Arcp => {
                removal_count(self.cfg.f, self.resolved.graphs[topo].in_degree(node))
            }
            ProtocolKind::Lcp => Ok(0),
        }
    }

    /// Right-hand side at stage time `t`, stage state `y`. Crash nodes use
    /// the pre-crash law throughout a step that starts before their crash
    /// time (steps are split at crash times, so a step never straddles one).
    fn rates(&self, topo: usize, step_start: f64, t: f64, y: &[f64]) -> Result<Vec<f64>, SimError> {
        let nc = self.normal_count();
        let mut out = vec![0.0; y.len()];
        for (pos, &node) in self.integrated.iter().enumerate() {
            if pos >= nc {
                let (_, kind) = self
                    .adversaries
                    .iter()
                    .find(|(id, _)| *id == node)
                    .expect("integrated adversaries are crash nodes");
                if let AdvKind::Crash { behavior, .. } = kind {
                    if behavior.crashed(step_start) {
                        continue;
                    }
                }
            }
            let incoming = self.incoming_for(topo, t, y, node, y[pos])?;
            let budget = self.budget(topo, node)?;
            out[pos] = arcp_rate(&incoming, budget, &self.resolved.weight_policy)?;
        }
        Ok(out)
    }

    /// One RK4 step of size `h` from (step_start, y); returns the new state
    /// vector and the first-stage rates (the instantaneous rates at t).
    fn rk4(
        &self,
        topo: usize,
        step_start: f64,
        h: f64,
        y: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>), SimError> {
        let stage = |base: &[f64], scale: f64, k: &[f64]| -> Vec<f64> {
            base.iter().zip(k).map(|(v, r)| v + scale * r).collect()
        };
        let k1 = self.rates(topo, step_start, step_start, y)?;
        let k2 = self.rates(topo, step_start, step_start + h / 2.0, &stage(y, h / 2.0, &k1))?;
        let k3 = self.rates(topo, step_start, step_start + h / 2.0, &stage(y, h / 2.0, &k2))?;
        let k4 = self.rates(topo, step_start, step_start + h, &stage(y, h, &k3))?;
        let mut next = Vec::with_capacity(y.len());
        for i in 0..y.len() {
            next.push(y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        }
        for (pos, value) in next.iter().enumerate() {
            if !value.is_finite() {
                return Err(SimError::NonFinite {
                    t: step_start + h,
                    node: self.integrated[pos],
                });
            }
        }
        Ok((next, k1))
    }

    /// Single public step. The step must not cross a switching instant and
    /// must satisfy h ≤ dwell; `run` splits steps at events automatically.
    pub fn step(&self, state: &SimState, h: f64) -> Result<SimState, SimError> {
        if !(h > 0.0 && h.is_finite()) || h > self.resolved.signal.dwell() {
            return Err(SimError::BadStepSize { h });
        }
        if let Some(switch) = self
            .resolved
            .signal
            .switch_times()
            .find(|s| *s > state.t && *s < state.t + h)
        {
            return Err(SimError::CrossesSwitch { t: state.t, h, switch });
        }
        let topo = self.resolved.signal.topology_at(state.t);
        let mut y = state.normal.clone();
        y.extend_from_slice(&state.crash);
        let (next, _) = self.rk4(topo, state.t, h, &y)?;
        let nc = self.normal_count();
        let t_next = state.t + h;
        Ok(SimState {
            t: t_next,
            normal: next[..nc].to_vec(),
            crash: next[nc..].to_vec(),
            topology_index: self.resolved.signal.topology_at(t_next),
        })
    }

    /// Distinct column ids (adversary, receiver) logged for this scenario:
    /// each adversary paired with its out-neighbors in the union over
    /// scheduled topologies.
    pub fn adversary_columns(&self) -> Vec<(u32, u32)> {
        let mut columns = Vec::new();
        for (node, _) in &self.adversaries {
            for receiver in self.resolved.scheduled_out_union(*node) {
                columns.push((*node, receiver));
            }
        }
        columns
    }

    /// Integrate from t = 0 to the horizon, recording samples and running
    /// the safety / monotonicity / rate-bound monitors each step.
    pub fn run(&self) -> Result<TrajectoryLog, SimError> {
        let integ = &self.cfg.integration;
        let horizon = integ.horizon;
        let h = integ.h;
        let nc = self.normal_count();

        // Event times where steps must end: switches, crash times, ramp ends.
        let mut events: Vec<f64> = self
            .resolved
            .signal
            .switch_times()
            .filter(|t| *t > 0.0 && *t < horizon)
            .collect();
        for (_, kind) in &self.adversaries {
            if let AdvKind::Crash { behavior, .. } = kind {
                if let Some(tk) = behavior.crash_time {
                    if tk > 0.0 && tk < horizon {
                        events.push(tk);
                    }
                    if behavior.fault_value.is_some() {
                        let ramp_end = tk + h;
                        if ramp_end > 0.0 && ramp_end < horizon {
                            events.push(ramp_end);
                        }
                    }
                }
            }
        }
        events.push(horizon);
        events.sort_by(f64::total_cmp);
        events.dedup();

        let mut y = self.cfg.initial_states.clone();
        y.extend_from_slice(&self.crash_initials);
        let mut t = 0.0;

        let m0 = y[..nc].iter().copied().fold(f64::INFINITY, f64::min);
        let max0 = y[..nc].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rate_bound = self.rate_bound_constant()?;

        let columns = self.adversary_columns();
        let mut log = TrajectoryLog {
            times: Vec::new(),
            topology: Vec::new(),
            normal_states: Vec::new(),
            adversary_columns: columns,
            adversary_values: Vec::new(),
            removed: Vec::new(),
            metrics: Vec::new(),
            verdicts: RunVerdicts {
                converged: false,
                consensus_value: None,
                psi_final: max0 - m0,
                psi_min: max0 - m0,
                safety_ok: true,
                monotone_ok: true,
                rate_bound_ok: true,
                initial_interval: (m0, max0),
                rate_bound,
                violations: Vec::new(),
            },
        };
        self.record_sample(&mut log, t, &y)?;

        let mut prev_max = max0;
        let mut prev_min = m0;
        let mut steps_done: u64 = 0;

        for &segment_end in &events {
            while t < segment_end {
                let topo = self.resolved.signal.topology_at(t);
                let remaining = segment_end - t;
                let (hs, t_next) = if remaining <= h * (1.0 + 1e-9) {
                    (remaining, segment_end)
                } else {
                    (h, t + h)
                };

                let (next, k1) = self.rk4(topo, t, hs, &y)?;

                // Rate-bound monitor on the instantaneous rates at t.
                let cur_max = y[..nc].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let cur_min = y[..nc].iter().copied().fold(f64::INFINITY, f64::min);
                for i in 0..nc {
                    let lo = rate_bound * (cur_min - y[i]) - integ.rate_tol;
                    let hi = rate_bound * (cur_max - y[i]) + integ.rate_tol;
                    if k1[i] < lo || k1[i] > hi {
                        log.verdicts.rate_bound_ok = false;
                        push_violation(
                            &mut log.verdicts.violations,
                            ViolationRecord {
                                t,
                                node: Some(i as u32),
                                kind: ViolationKind::RateBound { rate: k1[i], lo, hi },
                            },
                        );
                    }
                }

                y = next;
                t = t_next;
                steps_done += 1;

                // Safety and monotonicity monitors at the new step boundary.
                let new_max = y[..nc].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let new_min = y[..nc].iter().copied().fold(f64::INFINITY, f64::min);
                for (i, &value) in y[..nc].iter().enumerate() {
                    if value < m0 - integ.safety_tol || value > max0 + integ.safety_tol {
                        log.verdicts.safety_ok = false;
                        push_violation(
                            &mut log.verdicts.violations,
                            ViolationRecord {
                                t,
                                node: Some(i as u32),
                                kind: ViolationKind::Safety { value },
                            },
                        );
                    }
                }
                if new_max > prev_max + integ.mono_tol {
                    log.verdicts.monotone_ok = false;
                    push_violation(
                        &mut log.verdicts.violations,
                        ViolationRecord {
                            t,
                            node: None,
                            kind: ViolationKind::MonotoneMax { value: new_max, previous: prev_max },
                        },
                    );
                }
                if new_min < prev_min - integ.mono_tol {
                    log.verdicts.monotone_ok = false;
                    push_violation(
                        &mut log.verdicts.violations,
                        ViolationRecord {
                            t,
                            node: None,
                            kind: ViolationKind::MonotoneMin { value: new_min, previous: prev_min },
                        },
                    );
                }
                prev_max = new_max;
                prev_min = new_min;
                log.verdicts.psi_min = log.verdicts.psi_min.min(new_max - new_min);

                if steps_done.is_multiple_of(integ.sample_every as u64) && t < horizon {
                    self.record_sample(&mut log, t, &y)?;
                }
            }
        }

        if log.times.last() != Some(&horizon) {
            self.record_sample(&mut log, horizon, &y)?;
        }

        let last = log.metrics.last().expect("at least one sample");
        log.verdicts.psi_final = last.psi;
        if last.psi < integ.eps_consensus {
            log.verdicts.converged = true;
            log.verdicts.consensus_value = Some((last.min_normal + last.max_normal) / 2.0);
        }
        Ok(log)
    }

    /// B = beta · (n − 1 − min F_i) over normal nodes and scheduled
    /// topologies.
    fn rate_bound_constant(&self) -> Result<f64, SimError> {
        let n = self.resolved.n as f64;
        let mut min_budget = usize::MAX;
        for &idx in &self.resolved.scheduled {
            for node in 0..self.resolved.normal_count {
                min_budget = min_budget.min(self.budget(idx, node)?);
            }
        }
        if min_budget == usize::MAX {
            min_budget = 0;
        }
        Ok(self.resolved.weight_policy.beta() * (n - 1.0 - min_budget as f64))
    }

    fn record_sample(&self, log: &mut TrajectoryLog, t: f64, y: &[f64]) -> Result<(), SimError> {
        let nc = self.normal_count();
        let topo = self.resolved.signal.topology_at(t);
        log.times.push(t);
        log.topology.push(topo);
        log.normal_states.push(y[..nc].to_vec());

        let mut adv_row = Vec::with_capacity(log.adversary_columns.len());
        for &(adv, receiver) in &log.adversary_columns {
            adv_row.push(self.intended_value(topo, t, y, adv, receiver)?);
        }
        log.adversary_values.push(adv_row);

        let mut removed_row = Vec::with_capacity(nc);
        for i in 0..nc {
            let incoming = self.incoming_for(topo, t, y, i as u32, y[i])?;
            let budget = self.budget(topo, i as u32)?;
            removed_row.push(filter_values(&incoming, budget).removed);
        }
        log.removed.push(removed_row);

        let max_normal = y[..nc].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_normal = y[..nc].iter().copied().fold(f64::INFINITY, f64::min);
        log.metrics.push(MetricsSample {
            max_normal,
            min_normal,
            psi: max_normal - min_normal,
        });
        Ok(())
    }
}

fn push_violation(violations: &mut Vec<ViolationRecord>, record: ViolationRecord) {
    if violations.len() < MAX_RECORDED_VIOLATIONS {
        violations.push(record);
    }
}

/// Resolve, validate, and run a scenario end to end.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<TrajectoryLog, SimError> {
    Simulator::new(cfg)?.run()
}

impl ResolvedScenario {
    fn normal_nodes(&self) -> std::ops::Range<u32> {
        0..self.normal_count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::Fraction;
    use crate::graph::Digraph;
    use crate::scenario::{
        AdversaryAssignment, IntegrationConfig, ScheduleConfig, ScheduleEntry, WeightsConfig,
        SCENARIO_SCHEMA_VERSION,
    };
    use std::collections::BTreeMap;

    fn scenario(
        graphs: Vec<(&str, Digraph)>,
        entries: Vec<(f64, &str)>,
        dwell: f64,
        protocol: ProtocolKind,
        f: Fraction,
        adversaries: Vec<AdversaryAssignment>,
        initial: Vec<f64>,
    ) -> ScenarioConfig {
        ScenarioConfig {
            schema_version: SCENARIO_SCHEMA_VERSION,
            topologies: graphs
                .into_iter()
                .map(|(name, g)| (name.to_string(), g))
                .collect::<BTreeMap<_, _>>(),
            schedule: ScheduleConfig {
                dwell: if dwell.is_finite() { Some(dwell) } else { None },
                entries: entries
                    .into_iter()
                    .map(|(t, name)| ScheduleEntry { t, topology: name.into() })
                    .collect(),
            },
            protocol,
            f,
            weights: WeightsConfig { alpha: 1.0, beta: 1.0, uniform: Some(1.0), per_edge: None },
            adversaries,
            initial_states: initial,
            integration: IntegrationConfig::default(),
            enforce_f_local: true,
        }
    }

    fn two_node() -> ScenarioConfig {
        scenario(
            vec![("pair", Digraph::new(2, 2, vec![(0, 1), (1, 0)]).unwrap())],
            vec![(0.0, "pair")],
            f64::INFINITY,
            ProtocolKind::Arcp,
            Fraction::ZERO,
            vec![],
            vec![0.0, 1.0],
        )
    }

    #[test]
    fn consensus_is_an_exact_equilibrium() {
        let mut cfg = two_node();
        cfg.initial_states = vec![0.4, 0.4];
        let sim = Simulator::new(&cfg).unwrap();
        let s0 = sim.initial_state();
        let s1 = sim.step(&s0, 0.25).unwrap();
        assert_eq!(s1.normal, vec![0.4, 0.4]);
        let log = sim.run().unwrap();
        assert_eq!(log.final_normal_states(), &[0.4, 0.4]);
        assert!(log.verdicts.converged);
        // The extremal series are exactly constant, so zero tolerance passes.
        assert!(check_monotone(&log, 0.0));
    }

    // Two mutually coupled integrators contract their gap as e^{-2t}; one RK4
    // step reproduces that to O(h^5).
    #[test]
    fn rk4_step_matches_two_node_closed_form()  {
        let cfg = two_node();
        let sim = Simulator::new(&cfg).unwrap();
        let s0 = sim.initial_state();
        let s1 = sim.step(&s0, 0.1).unwrap();
        let gap = s1.normal[1] - s1.normal[0];
        let exact = (-0.2f64).exp();
        // Local truncation: |R(-0.2) - e^{-0.2}| = 2.6e-6 = O(h^5).
        assert!((gap - exact).abs() < 1e-5, "gap {gap} vs {exact}");
        assert!((gap - 0.8187).abs() < 1e-4);
        // The linear contraction advances exactly by the RK4 stability
        // polynomial R(z) = 1 + z + z²/2 + z³/6 + z⁴/24 at z = -2h.
        let z: f64 = -0.2;
        let stability = 1.0 + z + z * z / 2.0 + z.powi(3) / 6.0 + z.powi(4) / 24.0;
        assert!((gap - stability).abs() < 1e-12);
    }

    #[test]
    fn two_node_run_converges_to_midpoint() {
        let mut cfg = two_node();
        cfg.integration.horizon = 20.0;
        let log = run_scenario(&cfg).unwrap();
        assert!(log.verdicts.converged);
        assert!(log.verdicts.psi_final < 1e-9);
        let consensus = log.verdicts.consensus_value.unwrap();
        assert!((consensus - 0.5).abs() < 1e-9);
        assert!(log.verdicts.safety_ok && log.verdicts.monotone_ok && log.verdicts.rate_bound_ok);
    }

    // Single normal node with a stubborn constant-c in-neighbor under LCP:
    // x(t) = c + (x0 − c)·e^{−t}.
    #[test]
    fn stubborn_leader_scalar_closed_form() {
        let g = Digraph::new(2, 1, vec![(1, 0)]).unwrap();
        let mut cfg = scenario(
            vec![("g", g)],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Lcp,
            Fraction::ZERO,
            vec![AdversaryAssignment {
                node: 1,
                model: AdversaryModel::Malicious {
                    strategy: MaliciousStrategy::Constant { value: 2.0 },
                },
            }],
            vec![0.0],
        );
        cfg.enforce_f_local = false;
        cfg.integration.horizon = 1.0;
        let log = run_scenario(&cfg).unwrap();
        let exact = 2.0 + (0.0 - 2.0) * (-1.0f64).exp();
        let got = log.final_normal_states()[0];
        assert!((got - exact).abs() < 1e-9, "{got} vs {exact}");
    }

    #[test]
    fn switching_uses_right_continuous_topology() {
        // Topology a: only 1 → 0; topology b: only 0 → 1.
        let a = Digraph::new(2, 2, vec![(1, 0)]).unwrap();
        let b = Digraph::new(2, 2, vec![(0, 1)]).unwrap();
        let mut cfg = scenario(
            vec![("a", a), ("b", b)],
            vec![(0.0, "a"), (1.0, "b"), (2.0, "a")],
            1.0,
            ProtocolKind::Lcp,
            Fraction::ZERO,
            vec![],
            vec![0.0, 1.0],
        );
        cfg.integration.horizon = 3.0;
        cfg.integration.sample_every = 100;
        let log = run_scenario(&cfg).unwrap();
        for (t, topo) in log.times.iter().zip(&log.topology) {
            let expect = if *t < 1.0 {
                0
            } else if *t < 2.0 {
                1
            } else {
                0
            };
            assert_eq!(*topo, expect, "at t = {t}");
        }
    }

    #[test]
    fn step_refuses_to_cross_a_switch() {
        let a = Digraph::new(2, 2, vec![(1, 0)]).unwrap();
        let b = Digraph::new(2, 2, vec![(0, 1)]).unwrap();
        let cfg = scenario(
            vec![("a", a), ("b", b)],
            vec![(0.0, "a"), (1.0, "b")],
            1.0,
            ProtocolKind::Lcp,
            Fraction::ZERO,
            vec![],
            vec![0.0, 1.0],
        );
        let sim = Simulator::new(&cfg).unwrap();
        let mut state = sim.initial_state();
        state.t = 0.95;
        assert!(matches!(
            sim.step(&state, 0.2),
            Err(SimError::CrossesSwitch { .. })
        ));
        assert!(sim.step(&state, 0.05).is_ok());
        assert!(matches!(
            sim.step(&state, 1.5),
            Err(SimError::BadStepSize { .. })
        ));
    }

    #[test]
    fn numerical_blowup_is_reported() {
        let g = Digraph::new(2, 1, vec![(1, 0)]).unwrap();
        let mut cfg = scenario(
            vec![("g", g)],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Lcp,
            Fraction::ZERO,
            vec![AdversaryAssignment {
                node: 1,
                model: AdversaryModel::Malicious {
                    strategy: MaliciousStrategy::Constant { value: 1e308 },
                },
            }],
            vec![0.0],
        );
        cfg.enforce_f_local = false;
        cfg.weights = WeightsConfig { alpha: 1.0, beta: 1e4, uniform: Some(1e4), per_edge: None };
        let result = run_scenario(&cfg);
        assert!(matches!(result, Err(SimError::NonFinite { .. })));
    }

    #[test]
    fn crash_node_freezes_broadcast_at_crash_time() {
        // Normal pair listens to a crash node that dies at t = 1.
        let g = Digraph::new(3, 2, vec![(0, 1), (1, 0), (2, 0), (2, 1), (0, 2), (1, 2)]).unwrap();
        let mut cfg = scenario(
            vec![("g", g)],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Arcp,
            Fraction::ZERO,
            vec![AdversaryAssignment {
                node: 2,
                model: AdversaryModel::Crash(CrashBehavior {
                    crash_time: Some(1.0),
                    fault_value: None,
                    initial_value: 1.0,
                }),
            }],
            vec![0.0, 0.5],
        );
        cfg.enforce_f_local = false;
        cfg.integration.horizon = 3.0;
        cfg.integration.sample_every = 100;
        let log = run_scenario(&cfg).unwrap();
        let col = log
            .adversary_columns
            .iter()
            .position(|&(a, r)| a == 2 && r == 0)
            .unwrap();
        let mut frozen = None;
        for (idx, t) in log.times.iter().enumerate() {
            let value = log.adversary_values[idx][col];
            if *t >= 1.0 {
                let expect = *frozen.get_or_insert(value);
                assert_eq!(value, expect, "broadcast changed after crash at t = {t}");
            }
        }
        // Pre-crash the node moves (it behaves normally), so the frozen value
        // differs from the initial one.
        assert_ne!(frozen.unwrap(), 1.0);
    }

    #[test]
    fn crash_never_is_a_normal_agent_in_disguise() {
        // Same dynamics, once with node 2 normal, once as crash(never).
        let edges = vec![(0, 1), (1, 0), (2, 0), (2, 1), (0, 2), (1, 2)];
        let all_normal = scenario(
            vec![("g", Digraph::new(3, 3, edges.clone()).unwrap())],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Arcp,
            Fraction::ZERO,
            vec![],
            vec![0.0, 0.5, 1.0],
        );
        let mut with_crash = scenario(
            vec![("g", Digraph::new(3, 2, edges).unwrap())],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Arcp,
            Fraction::ZERO,
            vec![AdversaryAssignment {
                node: 2,
                model: AdversaryModel::Crash(CrashBehavior {
                    crash_time: None,
                    fault_value: None,
                    initial_value: 1.0,
                }),
            }],
            vec![0.0, 0.5],
        );
        with_crash.enforce_f_local = false;
        let mut a = all_normal.clone();
        a.integration.horizon = 2.0;
        let mut b = with_crash.clone();
        b.integration.horizon = 2.0;

        let log_a = run_scenario(&a).unwrap();
        let log_b = run_scenario(&b).unwrap();
        for (sa, sb) in log_a.normal_states.iter().zip(&log_b.normal_states) {
            assert_eq!(sa[0], sb[0]);
            assert_eq!(sa[1], sb[1]);
        }
    }

    #[test]
    fn fault_attack_ramps_to_the_imposed_constant() {
        let g = Digraph::new(2, 1, vec![(1, 0)]).unwrap();
        let mut cfg = scenario(
            vec![("g", g)],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Lcp,
            Fraction::ZERO,
            vec![AdversaryAssignment {
                node: 1,
                model: AdversaryModel::Crash(CrashBehavior {
                    crash_time: Some(0.0),
                    fault_value: Some(5.0),
                    initial_value: 0.0,
                }),
            }],
            vec![0.0],
        );
        cfg.enforce_f_local = false;
        cfg.integration.horizon = 0.01;
        cfg.integration.sample_every = 1;
        let log = run_scenario(&cfg).unwrap();
        let col = 0;
        // After one nominal step the broadcast sits at the fault constant.
        for (idx, t) in log.times.iter().enumerate() {
            if *t >= cfg.integration.h {
                assert_eq!(log.adversary_values[idx][col], 5.0);
            }
        }
        assert_eq!(log.adversary_values[0][col], 0.0);
    }

    #[test]
    fn identical_runs_produce_identical_logs() {
        let mut cfg = two_node();
        cfg.integration.horizon = 2.0;
        let log_a = run_scenario(&cfg).unwrap();
        let log_b = run_scenario(&cfg).unwrap();
        assert_eq!(log_a, log_b);
    }

    #[test]
    fn lcp_with_a_leader_breaks_monotonicity_and_safety() {
        let g = Digraph::complete(4, 3);
        let mut cfg = scenario(
            vec![("g", g)],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Lcp,
            Fraction::ZERO,
            vec![AdversaryAssignment {
                node: 3,
                model: AdversaryModel::Malicious {
                    strategy: MaliciousStrategy::Constant { value: 5.0 },
                },
            }],
            vec![0.0, 0.5, 1.0],
        );
        cfg.enforce_f_local = false;
        cfg.integration.horizon = 10.0;
        let log = run_scenario(&cfg).unwrap();
        assert!(!log.verdicts.safety_ok);
        assert!(!log.verdicts.monotone_ok);
        assert!(!check_monotone(&log, 1e-9));
        // All normal states dragged toward the leader.
        for v in log.final_normal_states() {
            assert!((v - 5.0).abs() < 1e-2);
        }

        // Same graph under ARC-P with f = 1/3 stays safe and converges.
        let mut arcp = cfg.clone();
        arcp.protocol = ProtocolKind::Arcp;
        arcp.f = Fraction::new(1, 3).unwrap();
        arcp.integration.horizon = 30.0;
        let log = run_scenario(&arcp).unwrap();
        assert!(log.verdicts.safety_ok);
        assert!(log.verdicts.monotone_ok);
        assert!(check_monotone(&log, 1e-9));
        assert!(log.verdicts.converged);
        let consensus = log.verdicts.consensus_value.unwrap();
        assert!((0.0..=1.0).contains(&consensus));
    }

    // Unreachable twin triangles pin their values exactly: Ψ stays 1.
    #[test]
    fn twin_triangle_construction_never_agrees() {
        let mut edges = Vec::new();
        for &(a, b, c) in &[(0u32, 1u32, 2u32), (3, 4, 5)] {
            for &(x, y) in &[(a, b), (b, a), (a, c), (c, a), (b, c), (c, b)] {
                edges.push((x, y));
            }
        }
        // One cross edge into each node from the opposite triangle.
        for i in 0..3u32 {
            edges.push((i + 3, i));
            edges.push((i, i + 3));
        }
        let g = Digraph::new(6, 6, edges).unwrap();
        let mut cfg = scenario(
            vec![("g", g)],
            vec![(0.0, "g")],
            f64::INFINITY,
            ProtocolKind::Arcp,
            Fraction::HALF,
            vec![],
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        );
        cfg.integration.horizon = 5.0;
        let log = run_scenario(&cfg).unwrap();
        assert!(!log.verdicts.converged);
        assert_eq!(log.verdicts.psi_final, 1.0);
        assert_eq!(log.verdicts.psi_min, 1.0);
        assert_eq!(log.final_normal_states(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    }
}
