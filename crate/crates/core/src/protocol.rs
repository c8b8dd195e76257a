//! Per-agent rate laws: the plain linear consensus protocol (LCP) and ARC-P
//! with fractional parameter f.
//!
//! ARC-P sorts the incoming values, removes up to F = ⌊f·d⌋ values strictly
//! larger than the receiver's own value and up to F strictly smaller (all of
//! them if fewer exist), then integrates the weighted relative states of the
//! kept senders. Values equal to the receiver's own are never removed.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::frac::Fraction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("removal fraction {0} lies outside [0, 1/2]")]
    RemovalFractionRange(Fraction),
    #[error("no weight configured for edge ({from}, {to})")]
    MissingWeight { from: u32, to: u32 },
    #[error("weight bounds require 0 < alpha ≤ beta (got alpha = {alpha}, beta = {beta})")]
    BadBounds { alpha: f64, beta: f64 },
    #[error("weight {weight} on edge ({from}, {to}) violates bounds [{alpha}, {beta}]")]
    WeightOutOfBounds {
        from: u32,
        to: u32,
        weight: f64,
        alpha: f64,
        beta: f64,
    },
}

/// Values conveyed to one receiver at one instant.
///
/// Senders must be distinct; the filter result does not depend on list order.
#[derive(Debug, Clone, PartialEq)]
pub struct Incoming {
    pub receiver: u32,
    pub receiver_value: f64,
    pub values: Vec<(u32, f64)>,
}

impl Incoming {
    pub fn new(receiver: u32, receiver_value: f64, values: Vec<(u32, f64)>) -> Self {
        debug_assert!(
            values
                .iter()
                .map(|(j, _)| *j)
                .collect::<BTreeSet<_>>()
                .len()
                == values.len(),
            "senders must be distinct"
        );
        Incoming {
            receiver,
            receiver_value,
            values,
        }
    }
}

/// Partition of the incoming senders into kept and removed.
///
/// `kept` is sorted by (value, sender id); `removed` holds the sender ids
/// whose values were filtered out.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    pub kept: Vec<(u32, f64)>,
    pub removed: BTreeSet<u32>,
}

/// Constant per-edge weights with declared bounds 0 < alpha ≤ w ≤ beta.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPolicy {
    alpha: f64,
    beta: f64,
    map: WeightMap,
}

#[derive(Debug, Clone, PartialEq)]
enum WeightMap {
    Uniform(f64),
    PerEdge(BTreeMap<(u32, u32), f64>),
}

impl WeightPolicy {
    fn check_bounds(alpha: f64, beta: f64) -> Result<(), ProtocolError> {
        if !(alpha > 0.0 && beta >= alpha && beta.is_finite()) {
            return Err(ProtocolError::BadBounds { alpha, beta });
        }
        Ok(())
    }

    pub fn uniform(weight: f64, alpha: f64, beta: f64) -> Result<Self, ProtocolError> {
        Self::check_bounds(alpha, beta)?;
        if !(weight >= alpha && weight <= beta) {
            return Err(ProtocolError::WeightOutOfBounds {
                from: 0,
                to: 0,
                weight,
                alpha,
                beta,
            });
        }
        Ok(WeightPolicy {
            alpha,
            beta,
            map: WeightMap::Uniform(weight),
        })
    }

    pub fn per_edge(
        weights: BTreeMap<(u32, u32), f64>,
        alpha: f64,
        beta: f64,
    ) -> Result<Self, ProtocolError> {
        Self::check_bounds(alpha, beta)?;
        for (&(from, to), &weight) in &weights {
            if !(weight >= alpha && weight <= beta) {
                return Err(ProtocolError::WeightOutOfBounds {
                    from,
                    to,
                    weight,
                    alpha,
                    beta,
                });
            }
        }
        Ok(WeightPolicy {
            alpha,
            beta,
            map: WeightMap::PerEdge(weights),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Weight of edge (from, to); None when a per-edge map has no entry.
    pub fn weight(&self, from: u32, to: u32) -> Option<f64> {
        match &self.map {
            WeightMap::Uniform(w) => Some(*w),
            WeightMap::PerEdge(map) => map.get(&(from, to)).copied(),
        }
    }

    pub fn covers(&self, from: u32, to: u32) -> bool {
        self.weight(from, to).is_some()
    }
}

/// F = ⌊f·d⌋, the number of extreme values removed at each end.
///
/// The protocol is defined for f ∈ [0, 1/2].
pub fn removal_count(f: Fraction, degree: usize) -> Result<usize, ProtocolError> {
    if f > Fraction::HALF {
        return Err(ProtocolError::RemovalFractionRange(f));
    }
    Ok(f.floor_mul(degree))
}

/// Sorted-removal filter with per-end budget `budget`.
///
/// Ties sort by (value, sender id), so the result is invariant under input
/// permutation. The strictly-larger/strictly-smaller guards mean the two
/// selections never overlap and values equal to the receiver's own survive.
pub fn filter_values(incoming: &Incoming, budget: usize) -> FilterResult {
    let mut sorted = incoming.values.clone();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let own = incoming.receiver_value;
    let smaller = sorted.iter().take_while(|(_, v)| *v < own).count();
    let larger = sorted.iter().rev().take_while(|(_, v)| *v > own).count();
    let cut_low = smaller.min(budget);
    let cut_high = larger.min(budget);

    let removed = sorted[..cut_low]
        .iter()
        .chain(&sorted[sorted.len() - cut_high..])
        .map(|(j, _)| *j)
        .collect();
    let kept = sorted[cut_low..sorted.len() - cut_high].to_vec();
    FilterResult { kept, removed }
}

/// ARC-P rate: Σ over kept senders j of w_(j,i) · (x_(j,i) − x_i).
///
/// Zero when everything is removed.
pub fn arcp_rate(
    incoming: &Incoming,
    budget: usize,
    weights: &WeightPolicy,
) -> Result<f64, ProtocolError> {
    let filtered = filter_values(incoming, budget);
    let mut rate = 0.0;
    for (sender, value) in &filtered.kept {
        let w = weights
            .weight(*sender, incoming.receiver)
            .ok_or(ProtocolError::MissingWeight {
                from: *sender,
                to: incoming.receiver,
            })?;
        rate += w * (value - incoming.receiver_value);
    }
    Ok(rate)
}

/// LCP rate: the unfiltered weighted sum of relative states.
pub fn lcp_rate(incoming: &Incoming, weights: &WeightPolicy) -> Result<f64, ProtocolError> {
    arcp_rate(incoming, 0, weights)
}
