//! Directed-graph data model: node partition, edge set, switching schedule.
//!
//! Nodes are `0..n`. By convention the first `normal_count` ids are normal
//! agents and the remaining ids are adversaries. An edge `(j, i)` means node
//! `j` conveys its value to node `i`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(u32),
    #[error("edge ({from}, {to}) references a node outside 0..{n}")]
    EdgeOutOfRange { from: u32, to: u32, n: u32 },
    #[error("normal_count {normal_count} exceeds node count {n}")]
    BadNormalCount { normal_count: u32, n: u32 },
    #[error("node set is empty")]
    EmptySet,
    #[error("node {node} is not a node of this digraph (n = {n})")]
    UnknownNode { node: u32, n: u32 },
    #[error("subset enumeration on {n} nodes exceeds the cap of {cap}")]
    EnumerationCap { n: u32, cap: u32 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("schedule must contain at least one entry")]
    Empty,
    #[error("first schedule entry must be at t = 0 (found {0})")]
    FirstEntryNotZero(f64),
    #[error("switch time at entry {index} is not finite and strictly increasing")]
    NotIncreasing { index: usize },
    #[error("gap before entry {index} is {gap} s, below the dwell time {dwell} s")]
    DwellViolated { index: usize, gap: f64, dwell: f64 },
    #[error("dwell time must be positive (found {0})")]
    BadDwell(f64),
    #[error("entry {index} references topology {topology}, but the library has {count}")]
    TopologyOutOfRange {
        index: usize,
        topology: usize,
        count: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DigraphDto {
    n: u32,
    normal_count: u32,
    edges: Vec<(u32, u32)>,
}

/// Directed graph with a normal/adversary node partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigraphDto", into = "DigraphDto")]
pub struct Digraph {
    n: u32,
    normal_count: u32,
    edges: BTreeSet<(u32, u32)>,
    ins: Vec<Vec<u32>>,
    outs: Vec<Vec<u32>>,
}

impl Digraph {
    pub fn new(
        n: u32,
        normal_count: u32,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        if normal_count > n {
            return Err(GraphError::BadNormalCount { normal_count, n });
        }
        let mut set = BTreeSet::new();
        for (from, to) in edges {
            if from == to {
                return Err(GraphError::SelfLoop(from));
            }
            if from >= n || to >= n {
                return Err(GraphError::EdgeOutOfRange { from, to, n });
            }
            set.insert((from, to));
        }
        let mut ins = vec![Vec::new(); n as usize];
        let mut outs = vec![Vec::new(); n as usize];
        for &(from, to) in &set {
            ins[to as usize].push(from);
            outs[from as usize].push(to);
        }
        for list in ins.iter_mut().chain(outs.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Digraph {
            n,
            normal_count,
            edges: set,
            ins,
            outs,
        })
    }

    /// Complete digraph: every ordered pair except self-loops.
    pub fn complete(n: u32, normal_count: u32) -> Self {
        let edges = (0..n).flat_map(|j| (0..n).filter(move |i| *i != j).map(move |i| (j, i)));
        Digraph::new(n, normal_count, edges).expect("complete digraph is always valid")
    }

    /// Directed cycle 0 → 1 → … → n−1 → 0.
    pub fn cycle(n: u32, normal_count: u32) -> Self {
        let edges = (0..n).map(|j| (j, (j + 1) % n));
        Digraph::new(n, normal_count, edges).expect("cycle digraph is always valid")
    }

    pub fn node_count(&self) -> u32 {
        self.n
    }

    pub fn normal_count(&self) -> u32 {
        self.normal_count
    }

    pub fn adversary_count(&self) -> u32 {
        self.n - self.normal_count
    }

    pub fn nodes(&self) -> std::ops::Range<u32> {
        0..self.n
    }

    pub fn normal_nodes(&self) -> std::ops::Range<u32> {
        0..self.normal_count
    }

    pub fn adversary_nodes(&self) -> std::ops::Range<u32> {
        self.normal_count..self.n
    }

    pub fn is_adversary(&self, id: u32) -> bool {
        id >= self.normal_count && id < self.n
    }

    pub fn has_edge(&self, from: u32, to: u32) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn in_neighbors(&self, i: u32) -> &[u32] {
        &self.ins[i as usize]
    }

    pub fn out_neighbors(&self, i: u32) -> &[u32] {
        &self.outs[i as usize]
    }

    pub fn in_degree(&self, i: u32) -> usize {
        self.ins[i as usize].len()
    }
}

impl TryFrom<DigraphDto> for Digraph {
    type Error = GraphError;

    fn try_from(dto: DigraphDto) -> Result<Self, Self::Error> {
        Digraph::new(dto.n, dto.normal_count, dto.edges)
    }
}

impl From<Digraph> for DigraphDto {
    fn from(g: Digraph) -> Self {
        DigraphDto {
            n: g.n,
            normal_count: g.normal_count,
            edges: g.edges.into_iter().collect(),
        }
    }
}

/// Subset of node ids, ordered for deterministic display and iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(BTreeSet<u32>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(BTreeSet::new())
    }

    pub fn singleton(id: u32) -> Self {
        NodeSet(BTreeSet::from([id]))
    }

    pub fn contains(&self, id: u32) -> bool {
        self.0.contains(&id)
    }

    pub fn insert(&mut self, id: u32) -> bool {
        self.0.insert(id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl FromIterator<u32> for NodeSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl From<BTreeSet<u32>> for NodeSet {
    fn from(set: BTreeSet<u32>) -> Self {
        NodeSet(set)
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, id) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for NodeSet {
    type Err = std::num::ParseIntError;

    /// Parses a comma-separated id list, e.g. `"0,2,5"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|part| !part.is_empty())
            .map(|part| part.parse::<u32>())
            .collect()
    }
}

/// Piecewise-constant, right-continuous map from time to a topology index.
///
/// The topology on `[t_k, t_{k+1})` is `entries[k]`; consecutive switch times
/// are at least `dwell` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSignal {
    entries: Vec<(f64, usize)>,
    dwell: f64,
}

impl SwitchingSignal {
    pub fn new(
        entries: Vec<(f64, usize)>,
        dwell: f64,
        topology_count: usize,
    ) -> Result<Self, ScheduleError> {
        if entries.is_empty() {
            return Err(ScheduleError::Empty);
        }
        if dwell.is_nan() || dwell <= 0.0 {
            return Err(ScheduleError::BadDwell(dwell));
        }
        if entries[0].0 != 0.0 {
            return Err(ScheduleError::FirstEntryNotZero(entries[0].0));
        }
        for (index, window) in entries.windows(2).enumerate() {
            let (prev, next) = (window[0].0, window[1].0);
            if !next.is_finite() || next <= prev {
                return Err(ScheduleError::NotIncreasing { index: index + 1 });
            }
            let gap = next - prev;
            // One ulp of slack: switch times like k·0.1 round to gaps a hair
            // below the dwell they were built from.
            if gap < dwell * (1.0 - 1e-12) {
                return Err(ScheduleError::DwellViolated {
                    index: index + 1,
                    gap,
                    dwell,
                });
            }
        }
        for (index, &(_, topology)) in entries.iter().enumerate() {
            if topology >= topology_count {
                return Err(ScheduleError::TopologyOutOfRange {
                    index,
                    topology,
                    count: topology_count,
                });
            }
        }
        Ok(SwitchingSignal { entries, dwell })
    }

    /// Time-invariant signal pinned to one topology.
    pub fn single(topology: usize, topology_count: usize) -> Result<Self, ScheduleError> {
        SwitchingSignal::new(vec![(0.0, topology)], f64::INFINITY, topology_count)
    }

    pub fn dwell(&self) -> f64 {
        self.dwell
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    /// Active topology at time `t` (right-continuous; `t < 0` maps to entry 0).
    pub fn topology_at(&self, t: f64) -> usize {
        let pos = self.entries.partition_point(|&(tk, _)| tk <= t);
        self.entries[pos.saturating_sub(1)].1
    }

    /// Switch instants after t = 0, in order.
    pub fn switch_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().skip(1).map(|&(t, _)| t)
    }
}
