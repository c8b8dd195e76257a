//! Fractional graph properties: edge reachability, robustness, locality.
//!
//! A nonempty set S is p-fraction edge reachable if some member i with
//! in-degree d_i > 0 has at least ⌈p·d_i⌉ in-neighbors outside S; every
//! nonempty set is 0-fraction edge reachable. A digraph is p-fraction robust
//! if every pair of nonempty disjoint node subsets has at least one
//! p-fraction edge reachable member. Subsets need not cover the node set.
//!
//! The robustness check enumerates subset pairs exhaustively, so it is capped
//! at [`SUBSET_ENUMERATION_CAP`] nodes. All verdicts are deterministic: a
//! failing pair is the smallest under the canonical subset order (bitmask
//! value, node i ↔ bit i, pairs ordered by (S1, S2) with S1 < S2).

use crate::frac::Fraction;
use crate::graph::{Digraph, GraphError, NodeSet};

/// Largest node count accepted by the subset-enumerating operations.
pub const SUBSET_ENUMERATION_CAP: u32 = 15;

/// Outcome of a robustness check; a negative verdict carries the first
/// witness pair in canonical order, when one exists (the empty/trivial
/// digraph is non-robust for p > 0 with no witness pair to show).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobustnessVerdict {
    Robust,
    NotRobust {
        witness: Option<(NodeSet, NodeSet)>,
    },
}

impl RobustnessVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, RobustnessVerdict::Robust)
    }

    pub fn witness(&self) -> Option<(&NodeSet, &NodeSet)> {
        match self {
            RobustnessVerdict::Robust => None,
            RobustnessVerdict::NotRobust { witness } => witness.as_ref().map(|(a, b)| (a, b)),
        }
    }
}

/// Outcome of an f-fraction locality check over a topology sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalityVerdict {
    Local,
    NotLocal { topology: usize, node: u32 },
}

impl LocalityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LocalityVerdict::Local)
    }

    pub fn violation(&self) -> Option<(usize, u32)> {
        match *self {
            LocalityVerdict::Local => None,
            LocalityVerdict::NotLocal { topology, node } => Some((topology, node)),
        }
    }
}

fn validate_set(graph: &Digraph, set: &NodeSet) -> Result<(), GraphError> {
    if set.is_empty() {
        return Err(GraphError::EmptySet);
    }
    for id in set.iter() {
        if id >= graph.node_count() {
            return Err(GraphError::UnknownNode {
                node: id,
                n: graph.node_count(),
            });
        }
    }
    Ok(())
}

/// True iff `set` is p-fraction edge reachable in `graph`.
pub fn is_p_fraction_edge_reachable(
    graph: &Digraph,
    set: &NodeSet,
    p: Fraction,
) -> Result<bool, GraphError> {
    validate_set(graph, set)?;
    if p.is_zero() {
        // Degenerate clause: every nonempty set is 0-fraction edge reachable.
        return Ok(true);
    }
    Ok(set.iter().any(|i| {
        let degree = graph.in_degree(i);
        if degree == 0 {
            return false;
        }
        let outside = graph
            .in_neighbors(i)
            .iter()
            .filter(|j| !set.contains(**j))
            .count();
        outside >= p.ceil_mul(degree)
    }))
}

/// Largest ratio |in-neighbors outside `set`| / in-degree over members with
/// positive in-degree; 0 when no member has in-neighbors outside the set.
///
/// `is_p_fraction_edge_reachable(g, s, p)` holds iff p = 0 or p ≤ this value.
pub fn edge_reachability_fraction(graph: &Digraph, set: &NodeSet) -> Result<Fraction, GraphError> {
    validate_set(graph, set)?;
    let mut best = Fraction::ZERO;
    for i in set.iter() {
        let degree = graph.in_degree(i);
        if degree == 0 {
            continue;
        }
        let outside = graph
            .in_neighbors(i)
            .iter()
            .filter(|j| !set.contains(**j))
            .count();
        let ratio = Fraction::new(outside as u64, degree as u64)
            .expect("outside count never exceeds in-degree");
        best = best.max(ratio);
    }
    Ok(best)
}

fn mask_to_set(mask: u32) -> NodeSet {
    (0..u32::BITS).filter(|b| mask & (1 << b) != 0).collect()
}

/// Per-subset reachability table over all 2^n bitmasks, for a fixed p.
fn reachability_table(graph: &Digraph, p: Fraction) -> Vec<bool> {
    let n = graph.node_count() as usize;
    let in_masks: Vec<u32> = (0..n as u32)
        .map(|i| {
            graph
                .in_neighbors(i)
                .iter()
                .fold(0u32, |m, j| m | (1 << *j))
        })
        .collect();
    let thresholds: Vec<usize> = (0..n as u32).map(|i| p.ceil_mul(graph.in_degree(i))).collect();

    let mut reachable = vec![false; 1 << n];
    for (mask, slot) in reachable.iter_mut().enumerate().skip(1) {
        let mask = mask as u32;
        let mut members = mask;
        while members != 0 {
            let i = members.trailing_zeros() as usize;
            members &= members - 1;
            if in_masks[i] != 0
                && (in_masks[i] & !mask).count_ones() as usize >= thresholds[i]
            {
                *slot = true;
                break;
            }
        }
    }
    reachable
}

fn check_enumeration_cap(graph: &Digraph) -> Result<(), GraphError> {
    let n = graph.node_count();
    if n > SUBSET_ENUMERATION_CAP {
        return Err(GraphError::EnumerationCap {
            n,
            cap: SUBSET_ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Exhaustive p-fraction robustness check over unordered pairs of nonempty
/// disjoint subsets.
pub fn is_p_fraction_robust(graph: &Digraph, p: Fraction) -> Result<RobustnessVerdict, GraphError> {
    check_enumeration_cap(graph)?;
    if graph.node_count() <= 1 {
        // Empty or trivial digraph: 0-fraction robust only.
        return Ok(if p.is_zero() {
            RobustnessVerdict::Robust
        } else {
            RobustnessVerdict::NotRobust { witness: None }
        });
    }
    if p.is_zero() {
        return Ok(RobustnessVerdict::Robust);
    }
    let reachable = reachability_table(graph, p);
    let unreachable: Vec<u32> = (1..reachable.len() as u32)
        .filter(|m| !reachable[*m as usize])
        .collect();
    for (k, &s1) in unreachable.iter().enumerate() {
        for &s2 in &unreachable[k + 1..] {
            if s1 & s2 == 0 {
                return Ok(RobustnessVerdict::NotRobust {
                    witness: Some((mask_to_set(s1), mask_to_set(s2))),
                });
            }
        }
    }
    Ok(RobustnessVerdict::Robust)
}

/// First witness pair (canonical order) with at least one normal node on each
/// side, if the graph is not p-fraction robust via such a pair.
pub fn find_normal_witness(
    graph: &Digraph,
    p: Fraction,
) -> Result<Option<(NodeSet, NodeSet)>, GraphError> {
    check_enumeration_cap(graph)?;
    if graph.node_count() <= 1 || p.is_zero() {
        return Ok(None);
    }
    let normal_mask: u32 = (0..graph.normal_count()).fold(0, |m, i| m | (1 << i));
    let reachable = reachability_table(graph, p);
    let unreachable: Vec<u32> = (1..reachable.len() as u32)
        .filter(|m| !reachable[*m as usize] && m & normal_mask != 0)
        .collect();
    for (k, &s1) in unreachable.iter().enumerate() {
        for &s2 in &unreachable[k + 1..] {
            if s1 & s2 == 0 {
                return Ok(Some((mask_to_set(s1), mask_to_set(s2))));
            }
        }
    }
    Ok(None)
}

/// Largest p for which the digraph is p-fraction robust.
///
/// ⌈p·d⌉ changes value only at fractions k/d for in-degrees d occurring in
/// the graph, so the search space is exactly those breakpoints plus {0, 1}.
pub fn max_fraction_robustness(graph: &Digraph) -> Result<Fraction, GraphError> {
    check_enumeration_cap(graph)?;
    if graph.node_count() <= 1 {
        return Ok(Fraction::ZERO);
    }
    let mut candidates = std::collections::BTreeSet::from([Fraction::ZERO, Fraction::ONE]);
    let degrees: std::collections::BTreeSet<usize> = graph
        .nodes()
        .map(|i| graph.in_degree(i))
        .filter(|d| *d > 0)
        .collect();
    for d in degrees {
        for k in 1..=d {
            candidates.insert(Fraction::new(k as u64, d as u64).expect("k ≤ d"));
        }
    }
    let candidates: Vec<Fraction> = candidates.into_iter().collect();
    // Robustness is monotone in p and always holds at p = 0, so binary search
    // for the last robust candidate.
    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if is_p_fraction_robust(graph, candidates[mid])?.holds() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(candidates[lo])
}

/// True iff `set` contains at most ⌊f·d_i⌋ in-neighbors of every node
/// i ∉ `set`, in every topology of the sequence.
pub fn is_f_fraction_local(topologies: &[Digraph], set: &NodeSet, f: Fraction) -> LocalityVerdict {
    for (topology, graph) in topologies.iter().enumerate() {
        for i in graph.nodes() {
            if set.contains(i) {
                continue;
            }
            let inside = graph
                .in_neighbors(i)
                .iter()
                .filter(|j| set.contains(**j))
                .count();
            if inside > f.floor_mul(graph.in_degree(i)) {
                return LocalityVerdict::NotLocal { topology, node: i };
            }
        }
    }
    LocalityVerdict::Local
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(num: u64, den: u64) -> Fraction {
        Fraction::new(num, den).unwrap()
    }

    fn set(ids: &[u32]) -> NodeSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn non_isolated_singleton_is_1_fraction_reachable() {
        let g = Digraph::cycle(3, 3);
        assert!(is_p_fraction_edge_reachable(&g, &set(&[0]), Fraction::ONE).unwrap());
        assert_eq!(
            edge_reachability_fraction(&g, &set(&[0])).unwrap(),
            Fraction::ONE
        );
    }

    #[test]
    fn every_nonempty_set_is_0_fraction_reachable() {
        let g = Digraph::new(3, 3, vec![(0, 1)]).unwrap();
        for ids in [vec![0], vec![2], vec![0, 1, 2]] {
            let s: NodeSet = ids.into_iter().collect();
            assert!(is_p_fraction_edge_reachable(&g, &s, Fraction::ZERO).unwrap());
        }
    }

    #[test]
    fn k4_two_set_reachability_boundary() {
        let g = Digraph::complete(4, 4);
        let s = set(&[0, 1]);
        // Node 0 sees {1, 2, 3}; two in-neighbors lie outside the set.
        assert!(is_p_fraction_edge_reachable(&g, &s, frac(2, 3)).unwrap());
        // Any p with ⌈3p⌉ = 3 fails.
        assert!(!is_p_fraction_edge_reachable(&g, &s, frac(67, 100)).unwrap());
        assert_eq!(edge_reachability_fraction(&g, &s).unwrap(), frac(2, 3));
    }

    #[test]
    fn isolated_singleton_has_zero_reachability_fraction() {
        let g = Digraph::new(3, 3, vec![(0, 1)]).unwrap();
        assert_eq!(
            edge_reachability_fraction(&g, &set(&[2])).unwrap(),
            Fraction::ZERO
        );
        assert!(!is_p_fraction_edge_reachable(&g, &set(&[2]), frac(1, 2)).unwrap());
    }

    #[test]
    fn reachability_rejects_bad_sets() {
        let g = Digraph::cycle(3, 3);
        assert_eq!(
            is_p_fraction_edge_reachable(&g, &NodeSet::new(), Fraction::ONE),
            Err(GraphError::EmptySet)
        );
        assert_eq!(
            edge_reachability_fraction(&g, &set(&[7])),
            Err(GraphError::UnknownNode { node: 7, n: 3 })
        );
    }

    #[test]
    fn trivial_digraph_is_0_fraction_robust_only() {
        let g = Digraph::new(1, 1, vec![]).unwrap();
        assert!(is_p_fraction_robust(&g, Fraction::ZERO).unwrap().holds());
        let verdict = is_p_fraction_robust(&g, Fraction::HALF).unwrap();
        assert!(!verdict.holds());
        assert_eq!(verdict.witness(), None);
        assert_eq!(max_fraction_robustness(&g).unwrap(), Fraction::ZERO);
    }

    #[test]
    fn empty_digraph_is_0_fraction_robust() {
        let g = Digraph::new(0, 0, vec![]).unwrap();
        assert!(is_p_fraction_robust(&g, Fraction::ZERO).unwrap().holds());
        assert!(!is_p_fraction_robust(&g, Fraction::ONE).unwrap().holds());
        assert_eq!(max_fraction_robustness(&g).unwrap(), Fraction::ZERO);
    }

    #[test]
    fn k4_robustness_boundary_with_witness() {
        let g = Digraph::complete(4, 4);
        assert!(is_p_fraction_robust(&g, frac(2, 3)).unwrap().holds());
        let verdict = is_p_fraction_robust(&g, frac(3, 4)).unwrap();
        let (s1, s2) = verdict.witness().expect("witness pair expected");
        assert_eq!(s1.len(), 2);
        assert_eq!(s2.len(), 2);
        assert!(s1.is_disjoint(s2));
        assert_eq!(max_fraction_robustness(&g).unwrap(), frac(2, 3));
    }

    #[test]
    fn directed_4_cycle_is_1_fraction_robust() {
        let g = Digraph::cycle(4, 4);
        assert!(is_p_fraction_robust(&g, Fraction::ONE).unwrap().holds());
        assert_eq!(max_fraction_robustness(&g).unwrap(), Fraction::ONE);
    }

    #[test]
    fn k8_max_robustness_is_4_sevenths() {
        let g = Digraph::complete(8, 8);
        assert_eq!(max_fraction_robustness(&g).unwrap(), frac(4, 7));
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let g = Digraph::new(16, 16, vec![]).unwrap();
        assert_eq!(
            is_p_fraction_robust(&g, Fraction::HALF),
            Err(GraphError::EnumerationCap { n: 16, cap: 15 })
        );
        assert!(max_fraction_robustness(&g).is_err());
    }

    #[test]
    fn witness_is_canonical_smallest() {
        // Two isolated nodes: every singleton is unreachable for p > 0.
        // Canonical first pair is ({0}, {1}).
        let g = Digraph::new(3, 3, vec![]).unwrap();
        let verdict = is_p_fraction_robust(&g, Fraction::HALF).unwrap();
        let (s1, s2) = verdict.witness().unwrap();
        assert_eq!((s1, s2), (&set(&[0]), &set(&[1])));
    }

    #[test]
    fn normal_witness_needs_normal_nodes_on_both_sides() {
        // Nodes 0, 1 normal; node 2 adversary; no edges at all.
        let g = Digraph::new(3, 2, vec![]).unwrap();
        let (s1, s2) = find_normal_witness(&g, Fraction::HALF).unwrap().unwrap();
        assert!(s1.iter().any(|i| i < 2));
        assert!(s2.iter().any(|i| i < 2));

        // With a single normal node no such pair exists.
        let g = Digraph::new(3, 1, vec![]).unwrap();
        assert_eq!(find_normal_witness(&g, Fraction::HALF).unwrap(), None);
        // The plain verdict still reports non-robustness.
        assert!(!is_p_fraction_robust(&g, Fraction::HALF).unwrap().holds());
    }

    #[test]
    fn locality_floor_boundary() {
        // Node 0 has in-degree 3 with exactly one in-neighbor in S = {1}.
        let g = Digraph::new(4, 4, vec![(1, 0), (2, 0), (3, 0)]).unwrap();
        let tops = [g];
        let s = set(&[1]);
        assert!(is_f_fraction_local(&tops, &s, frac(1, 3)).holds());
        let verdict = is_f_fraction_local(&tops, &s, frac(1, 4));
        assert_eq!(verdict.violation(), Some((0, 0)));
    }

    #[test]
    fn empty_set_is_f_local_for_any_f() {
        let tops = [Digraph::complete(4, 4)];
        assert!(is_f_fraction_local(&tops, &NodeSet::new(), Fraction::ZERO).holds());
    }

    #[test]
    fn k8_single_adversary_is_quarter_local() {
        let g = Digraph::complete(8, 7);
        let tops = [g];
        assert!(is_f_fraction_local(&tops, &set(&[7]), frac(1, 4)).holds());
    }

    #[test]
    fn locality_checks_every_topology_in_sequence() {
        let dense = Digraph::complete(4, 3);
        // Sparse topology: node 0 hears only the adversary.
        let sparse = Digraph::new(4, 3, vec![(3, 0), (1, 2), (2, 1)]).unwrap();
        let s = set(&[3]);
        assert!(is_f_fraction_local(std::slice::from_ref(&dense), &s, frac(1, 3)).holds());
        let verdict = is_f_fraction_local(&[dense, sparse], &s, frac(1, 3));
        assert_eq!(verdict.violation(), Some((1, 0)));
    }
}
