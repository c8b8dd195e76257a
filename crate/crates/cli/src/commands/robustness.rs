//! Robustness analysis of a single digraph file.

use std::fmt::Write as _;
use std::path::Path;

use arcp_core::{
    edge_reachability_fraction, is_p_fraction_robust, load_graph_file, max_fraction_robustness,
    Digraph, Fraction, NodeSet,
};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct PQuery {
    pub p: Fraction,
    pub robust: bool,
    pub witness: Option<(NodeSet, NodeSet)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetQuery {
    pub set: NodeSet,
    pub reachability_fraction: Fraction,
}

#[derive(Debug, Clone, Serialize)]
pub struct RobustnessReport {
    pub n: u32,
    pub normal_count: u32,
    pub edge_count: usize,
    pub max_robustness: Fraction,
    pub queries: Vec<PQuery>,
    pub sets: Vec<SetQuery>,
}

impl RobustnessReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "digraph: n = {}, normal = {}, edges = {}",
            self.n, self.normal_count, self.edge_count
        );
        let _ = writeln!(out, "max fraction robustness: {}", self.max_robustness);
        for q in &self.queries {
            match (&q.robust, &q.witness) {
                (true, _) => {
                    let _ = writeln!(out, "p = {}: robust", q.p);
                }
                (false, Some((s1, s2))) => {
                    let _ = writeln!(out, "p = {}: NOT robust, witness {s1} / {s2}", q.p);
                }
                (false, None) => {
                    let _ = writeln!(out, "p = {}: NOT robust (empty or trivial digraph)", q.p);
                }
            }
        }
        for s in &self.sets {
            let _ = writeln!(
                out,
                "set {}: edge reachability fraction {}",
                s.set, s.reachability_fraction
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

pub fn robustness_of(
    graph: &Digraph,
    ps: &[Fraction],
    sets: &[NodeSet],
) -> Result<RobustnessReport, CliError> {
    let max_robustness = max_fraction_robustness(graph)?;
    let mut queries = Vec::with_capacity(ps.len());
    for &p in ps {
        let verdict = is_p_fraction_robust(graph, p)?;
        queries.push(PQuery {
            p,
            robust: verdict.holds(),
            witness: verdict.witness().map(|(a, b)| (a.clone(), b.clone())),
        });
    }
    let mut set_queries = Vec::with_capacity(sets.len());
    for set in sets {
        set_queries.push(SetQuery {
            set: set.clone(),
            reachability_fraction: edge_reachability_fraction(graph, set)?,
        });
    }
    Ok(RobustnessReport {
        n: graph.node_count(),
        normal_count: graph.normal_count(),
        edge_count: graph.edge_count(),
        max_robustness,
        queries,
        sets: set_queries,
    })
}

pub fn robustness(
    graph_path: &Path,
    ps: &[Fraction],
    sets: &[NodeSet],
) -> Result<RobustnessReport, CliError> {
    let graph = load_graph_file(graph_path)?;
    robustness_of(&graph, ps, sets)
}
