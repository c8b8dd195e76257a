//! Omniscient adversary strategies: crash, malicious, Byzantine.
//!
//! Adversaries read the true simulator state but never mutate it. Malicious
//! and crash adversaries broadcast one value to all out-neighbors; Byzantine
//! adversaries may send a different continuous trajectory to each receiver.
//! All built-ins produce trajectories continuous in t, matching the model's
//! detectability constraint.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Digraph, NodeSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("no per-receiver strategy configured for receiver {receiver} of adversary {node}")]
    MissingReceiver { node: u32, receiver: u32 },
}

/// Read-only snapshot handed to strategies: true time, true normal states,
/// the active topology, and the nominal integration step (used by the
/// crash fault ramp).
#[derive(Debug, Clone, Copy)]
pub struct OmniscientView<'a> {
    pub t: f64,
    pub normal_states: &'a [f64],
    pub topology: &'a Digraph,
    pub step_h: f64,
}

impl OmniscientView<'_> {
    pub fn normal_max(&self) -> f64 {
        self.normal_states.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn normal_min(&self) -> f64 {
        self.normal_states.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Broadcast trajectories available to malicious adversaries (and reused as
/// the per-receiver pieces of Byzantine strategies).
///
/// `chase_max`/`chase_min` track the extreme normal values plus an offset;
/// they are the worst-case-style probes used in the sufficiency experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaliciousStrategy {
    Constant { value: f64 },
    Ramp { start: f64, slope: f64 },
    Sinusoid { center: f64, amplitude: f64, freq_hz: f64 },
    ChaseMax { offset: f64 },
    ChaseMin { offset: f64 },
}

impl MaliciousStrategy {
    pub fn value(&self, view: &OmniscientView) -> f64 {
        match *self {
            MaliciousStrategy::Constant { value } => value,
            MaliciousStrategy::Ramp { start, slope } => start + slope * view.t,
            MaliciousStrategy::Sinusoid { center, amplitude, freq_hz } => {
                center + amplitude * (TAU * freq_hz * view.t).sin()
            }
            MaliciousStrategy::ChaseMax { offset } => view.normal_max() + offset,
            MaliciousStrategy::ChaseMin { offset } => view.normal_min() - offset,
        }
    }
}

/// Duplicitous strategies: distinct trajectories per receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ByzantineStrategy {
    /// One trajectory to `high_receivers`, another to everyone else.
    Split {
        high: MaliciousStrategy,
        low: MaliciousStrategy,
        high_receivers: NodeSet,
    },
    /// Explicit strategy per receiver.
    PerReceiver {
        receivers: Vec<PerReceiverStrategy>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerReceiverStrategy {
    pub receiver: u32,
    pub strategy: MaliciousStrategy,
}

impl ByzantineStrategy {
    pub fn value_for(
        &self,
        view: &OmniscientView,
        node: u32,
        receiver: u32,
    ) -> Result<f64, AdversaryError> {
        match self {
            ByzantineStrategy::Split { high, low, high_receivers } => {
                if high_receivers.contains(receiver) {
                    Ok(high.value(view))
                } else {
                    Ok(low.value(view))
                }
            }
            ByzantineStrategy::PerReceiver { receivers } => receivers
                .iter()
                .find(|entry| entry.receiver == receiver)
                .map(|entry| entry.strategy.value(view))
                .ok_or(AdversaryError::MissingReceiver { node, receiver }),
        }
    }
}

/// Crash node parameters: behaves normally (same ARC-P rate law) until
/// `crash_time`, then its broadcast freezes at the state reached there.
/// `crash_time: None` means the node never crashes. With `fault_value` set,
/// the broadcast ramps from the frozen state to the fault constant over one
/// nominal integration step and holds, keeping the trajectory continuous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashBehavior {
    #[serde(default)]
    pub crash_time: Option<f64>,
    #[serde(default)]
    pub fault_value: Option<f64>,
    #[serde(default)]
    pub initial_value: f64,
}

impl CrashBehavior {
    pub fn crashed(&self, t: f64) -> bool {
        matches!(self.crash_time, Some(tk) if t >= tk)
    }

    /// Broadcast value at time `t` given the node's integrated state, which
    /// holds x_k(t_k) for t ≥ t_k because the rate is forced to zero there.
    pub fn broadcast(&self, t: f64, state: f64, ramp_len: f64) -> f64 {
        match self.crash_time {
            Some(tk) if t >= tk => match self.fault_value {
                Some(fault) => {
                    let progress = if ramp_len > 0.0 {
                        ((t - tk) / ramp_len).clamp(0.0, 1.0)
                    } else {
                        1.0
                    };
                    state + (fault - state) * progress
                }
                None => state,
            },
            _ => state,
        }
    }
}

/// Per-out-neighbor intended values produced by one adversary at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryOutput {
    values: Vec<(u32, f64)>,
}

impl AdversaryOutput {
    pub fn value_for(&self, receiver: u32) -> Option<f64> {
        self.values
            .iter()
            .find(|(r, _)| *r == receiver)
            .map(|(_, v)| *v)
    }

    pub fn receivers(&self) -> impl Iterator<Item = u32> + '_ {
        self.values.iter().map(|(r, _)| *r)
    }

    pub fn values(&self) -> &[(u32, f64)] {
        &self.values
    }

    /// True when every receiver sees the same value (broadcast consistency).
    pub fn is_broadcast(&self) -> bool {
        self.values
            .windows(2)
            .all(|w| w[0].1.to_bits() == w[1].1.to_bits())
    }
}

/// Crash-node output: one value broadcast to all current out-neighbors.
pub fn crash_output(
    view: &OmniscientView,
    node: u32,
    behavior: &CrashBehavior,
    state: f64,
) -> AdversaryOutput {
    let value = behavior.broadcast(view.t, state, view.step_h);
    AdversaryOutput {
        values: view
            .topology
            .out_neighbors(node)
            .iter()
            .map(|r| (*r, value))
            .collect(),
    }
}

/// Malicious output: one strategy value broadcast to all out-neighbors.
pub fn malicious_output(
    view: &OmniscientView,
    node: u32,
    strategy: &MaliciousStrategy,
) -> AdversaryOutput {
    let value = strategy.value(view);
    AdversaryOutput {
        values: view
            .topology
            .out_neighbors(node)
            .iter()
            .map(|r| (*r, value))
            .collect(),
    }
}

/// Byzantine output: per-receiver trajectories.
pub fn byzantine_output(
    view: &OmniscientView,
    node: u32,
    strategy: &ByzantineStrategy,
) -> Result<AdversaryOutput, AdversaryError> {
    let values = view
        .topology
        .out_neighbors(node)
        .iter()
        .map(|r| Ok((*r, strategy.value_for(view, node, *r)?)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AdversaryOutput { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view<'a>(t: f64, states: &'a [f64], g: &'a Digraph) -> OmniscientView<'a> {
        OmniscientView {
            t,
            normal_states: states,
            topology: g,
            step_h: 0.001,
        }
    }

    #[test]
    fn builtin_strategy_values() {
        let g = Digraph::complete(3, 2);
        let states = [0.2, 0.7];
        let v = view(0.25, &states, &g);

        assert_eq!(MaliciousStrategy::Constant { value: 4.0 }.value(&v), 4.0);
        assert_eq!(
            MaliciousStrategy::Ramp { start: 0.0, slope: 1.0 }.value(&view(3.0, &states, &g)),
            3.0
        );
        let sin = MaliciousStrategy::Sinusoid { center: 0.5, amplitude: 0.5, freq_hz: 1.0 };
        assert!((sin.value(&v) - 1.0).abs() < 1e-12);
        assert_eq!(MaliciousStrategy::ChaseMax { offset: 0.1 }.value(&v), 0.7 + 0.1);
        assert_eq!(MaliciousStrategy::ChaseMin { offset: 0.1 }.value(&v), 0.2 - 0.1);
    }

    #[test]
    fn malicious_output_is_broadcast_consistent() {
        let g = Digraph::complete(4, 3);
        let states = [0.0, 0.5, 1.0];
        let out = malicious_output(
            &view(1.0, &states, &g),
            3,
            &MaliciousStrategy::ChaseMax { offset: 0.25 },
        );
        assert!(out.is_broadcast());
        assert_eq!(out.receivers().count(), 3);
        assert_eq!(out.value_for(1), Some(1.25));
    }

    #[test]
    fn split_sends_two_trajectories() {
        let g = Digraph::complete(5, 4);
        let states = [0.0; 4];
        let strat = ByzantineStrategy::Split {
            high: MaliciousStrategy::Constant { value: 1.0 },
            low: MaliciousStrategy::Constant { value: 0.0 },
            high_receivers: [0, 2].into_iter().collect(),
        };
        let out = byzantine_output(&view(7.0, &states, &g), 4, &strat).unwrap();
        assert_eq!(out.value_for(0), Some(1.0));
        assert_eq!(out.value_for(2), Some(1.0));
        assert_eq!(out.value_for(1), Some(0.0));
        assert_eq!(out.value_for(3), Some(0.0));
        assert!(!out.is_broadcast());
    }

    #[test]
    fn per_receiver_with_identical_strategies_degenerates_to_broadcast() {
        let g = Digraph::complete(4, 3);
        let states = [0.1, 0.2, 0.3];
        let strat = ByzantineStrategy::PerReceiver {
            receivers: (0..3)
                .map(|r| PerReceiverStrategy {
                    receiver: r,
                    strategy: MaliciousStrategy::Ramp { start: 1.0, slope: 2.0 },
                })
                .collect(),
        };
        let v = view(0.5, &states, &g);
        let byz = byzantine_output(&v, 3, &strat).unwrap();
        let mal = malicious_output(&v, 3, &MaliciousStrategy::Ramp { start: 1.0, slope: 2.0 });
        assert_eq!(byz, mal);
        assert!(byz.is_broadcast());
    }

    #[test]
    fn per_receiver_missing_entry_is_an_error() {
        let g = Digraph::complete(3, 2);
        let states = [0.0, 0.0];
        let strat = ByzantineStrategy::PerReceiver {
            receivers: vec![PerReceiverStrategy {
                receiver: 0,
                strategy: MaliciousStrategy::Constant { value: 1.0 },
            }],
        };
        assert_eq!(
            byzantine_output(&view(0.0, &states, &g), 2, &strat),
            Err(AdversaryError::MissingReceiver { node: 2, receiver: 1 })
        );
    }

    #[test]
    fn crash_freezes_and_optionally_ramps_to_fault_value() {
        let frozen = 0.7;
        let plain = CrashBehavior { crash_time: Some(2.0), fault_value: None, initial_value: 0.0 };
        assert!(!plain.crashed(1.999));
        assert!(plain.crashed(2.0));
        assert_eq!(plain.broadcast(1.0, 0.4, 0.1), 0.4);
        assert_eq!(plain.broadcast(2.0, frozen, 0.1), frozen);
        assert_eq!(plain.broadcast(50.0, frozen, 0.1), frozen);

        let fault = CrashBehavior {
            crash_time: Some(2.0),
            fault_value: Some(3.0),
            initial_value: 0.0,
        };
        assert_eq!(fault.broadcast(2.0, 1.0, 0.1), 1.0);
        assert!((fault.broadcast(2.05, 1.0, 0.1) - 2.0).abs() < 1e-12);
        assert_eq!(fault.broadcast(2.1, 1.0, 0.1), 3.0);
        assert_eq!(fault.broadcast(9.0, 1.0, 0.1), 3.0);
    }

    #[test]
    fn never_crashing_node_just_relays_its_state() {
        let never = CrashBehavior { crash_time: None, fault_value: None, initial_value: 0.5 };
        assert!(!never.crashed(1e12));
        assert_eq!(never.broadcast(1e12, 0.123, 0.1), 0.123);
    }

    // Halving the sampling step halves the largest jump for the time-varying
    // built-ins; constants do not jump at all.
    #[test]
    fn builtin_trajectories_are_continuous_under_step_refinement() {
        let g = Digraph::complete(3, 2);
        let states = [0.25, 0.75];
        let strategies = [
            MaliciousStrategy::Constant { value: 2.0 },
            MaliciousStrategy::Ramp { start: -1.0, slope: 3.0 },
            MaliciousStrategy::Sinusoid { center: 0.0, amplitude: 1.0, freq_hz: 2.0 },
            MaliciousStrategy::ChaseMax { offset: 0.3 },
        ];
        for strat in &strategies {
            let max_jump = |h: f64| -> f64 {
                let steps = (2.0 / h) as usize;
                (0..steps)
                    .map(|k| {
                        let a = strat.value(&view(k as f64 * h, &states, &g));
                        let b = strat.value(&view((k + 1) as f64 * h, &states, &g));
                        (b - a).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let coarse = max_jump(0.01);
            let fine = max_jump(0.005);
            if matches!(strat, MaliciousStrategy::Constant { .. }) {
                assert_eq!(coarse, 0.0);
                assert_eq!(fine, 0.0);
            } else {
                assert!(fine <= 0.6 * coarse + 1e-12, "jump did not shrink: {strat:?}");
            }
        }
    }
}
