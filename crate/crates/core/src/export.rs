//! Deterministic data export: trajectory CSV, run-summary JSON, and a
//! gnuplot data/script pair.
//!
//! Floats are written with Rust's shortest round-trip formatting, so repeated
//! runs of the same scenario produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::frac::Fraction;
use crate::graph::NodeSet;
use crate::robustness::{is_f_fraction_local, max_fraction_robustness};
use crate::scenario::ScenarioConfig;
use crate::sim::TrajectoryLog;

/// Headline result of one run; serialized one-to-one as the summary JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub converged: bool,
    pub consensus_value: Option<f64>,
    pub psi_final: f64,
    pub safety_ok: bool,
    pub monotone_ok: bool,
    pub rate_bound_ok: bool,
    /// Max fraction robustness per scheduled topology; null when the graph
    /// exceeds the enumeration cap.
    pub robustness: BTreeMap<String, Option<Fraction>>,
    pub f_local_ok: bool,
}

/// Builds the summary from a completed log plus the scenario's graph-level
/// analysis (per-topology robustness, adversary locality).
pub fn build_run_summary(cfg: &ScenarioConfig, log: &TrajectoryLog) -> RunSummary {
    let mut robustness = BTreeMap::new();
    let mut f_local_ok = true;
    if let Ok(resolved) = cfg.resolve() {
        for &idx in &resolved.scheduled {
            let graph = &resolved.graphs[idx];
            robustness.insert(
                resolved.names[idx].clone(),
                max_fraction_robustness(graph).ok(),
            );
        }
        let adversary_set: NodeSet = cfg.adversaries.iter().map(|a| a.node).collect();
        let scheduled: Vec<_> = resolved
            .scheduled
            .iter()
            .map(|i| resolved.graphs[*i].clone())
            .collect();
        f_local_ok = is_f_fraction_local(&scheduled, &adversary_set, cfg.f).holds();
    }
    RunSummary {
        converged: log.verdicts.converged,
        consensus_value: log.verdicts.consensus_value,
        psi_final: log.verdicts.psi_final,
        safety_ok: log.verdicts.safety_ok,
        monotone_ok: log.verdicts.monotone_ok,
        rate_bound_ok: log.verdicts.rate_bound_ok,
        robustness,
        f_local_ok,
    }
}

pub fn summary_to_json(summary: &RunSummary) -> String {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    text
}

fn csv_header(log: &TrajectoryLog) -> String {
    let mut header = String::from("t");
    for i in 0..log.normal_count() {
        let _ = write!(header, ",x_{i}");
    }
    for (adv, receiver) in &log.adversary_columns {
        let _ = write!(header, ",adv{adv}_to_{receiver}");
    }
    header.push_str(",M_N,m_N,Psi");
    header
}

fn push_row(out: &mut String, log: &TrajectoryLog, idx: usize, sep: char) {
    let _ = write!(out, "{}", log.times[idx]);
    for v in &log.normal_states[idx] {
        let _ = write!(out, "{sep}{v}");
    }
    for v in &log.adversary_values[idx] {
        let _ = write!(out, "{sep}{v}");
    }
    let m = &log.metrics[idx];
    let _ = write!(out, "{sep}{}{sep}{}{sep}{}", m.max_normal, m.min_normal, m.psi);
    out.push('\n');
}

/// Trajectory CSV: `t, x_0..x_{N-1}, adv<k>_to_<i>.., M_N, m_N, Psi`.
pub fn trajectory_to_csv(log: &TrajectoryLog) -> String {
    let mut out = csv_header(log);
    out.push('\n');
    for idx in 0..log.times.len() {
        push_row(&mut out, log, idx, ',');
    }
    out
}

/// Space-separated variant of the trajectory table for gnuplot.
pub fn trajectory_to_dat(log: &TrajectoryLog) -> String {
    let mut out = String::from("# ");
    out.push_str(&csv_header(log).replace(',', " "));
    out.push('\n');
    for idx in 0..log.times.len() {
        push_row(&mut out, log, idx, ' ');
    }
    out
}

/// Gnuplot script plotting the normal states and the M_N/m_N envelope from
/// the sibling `.dat` file.
pub fn gnuplot_script(dat_filename: &str, log: &TrajectoryLog, title: &str) -> String {
    let n = log.normal_count();
    let adv_cols = log.adversary_columns.len();
    let m_col = 1 + n + adv_cols + 1;
    let mut script = String::new();
    let _ = writeln!(script, "set title {title:?}");
    let _ = writeln!(script, "set xlabel \"t (s)\"");
    let _ = writeln!(script, "set ylabel \"state\"");
    let _ = writeln!(script, "set key outside right");
    let _ = writeln!(script, "set grid");
    let _ = writeln!(
        script,
        "plot for [i=2:{}] {:?} using 1:i with lines title sprintf(\"x_%d\", i-2), \\",
        n + 1,
        dat_filename,
    );
    let _ = writeln!(
        script,
        "     {dat_filename:?} using 1:{m_col} with lines dt 2 lw 2 title \"M_N\", \\"
    );
    let _ = writeln!(
        script,
        "     {dat_filename:?} using 1:{} with lines dt 2 lw 2 title \"m_N\"",
        m_col + 1
    );
    script
}
