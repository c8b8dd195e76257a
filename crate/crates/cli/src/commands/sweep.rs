//! Parameter sweeps: re-run a scenario template across one axis and tabulate
//! robustness against convergence outcome.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use arcp_core::{
    build_run_summary, load_scenario, run_scenario, AdversaryModel, CrashBehavior, Fraction,
    ScenarioConfig, ScheduleEntry,
};

use crate::{CliError, THREADS_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Override the removal fraction f.
    F,
    /// Pin the schedule to one named topology per point.
    Topology,
    /// Keep the first k adversary assignments active; later slots crash
    /// never, i.e. behave like normal agents.
    AdversaryCount,
    /// Rebuild a periodic schedule switching every τ seconds.
    Dwell,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::F => "f",
            SweepAxis::Topology => "topology",
            SweepAxis::AdversaryCount => "adversary_count",
            SweepAxis::Dwell => "dwell",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub f: Fraction,
    pub min_robustness: Option<Fraction>,
    pub converged: bool,
    pub psi_final: f64,
    pub safety_ok: bool,
    pub monotone_ok: bool,
    pub f_local_ok: bool,
    pub consensus_value: Option<f64>,
}

#[derive(Debug)]
pub struct SweepOutput {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "axis,value,f,min_robustness,converged,psi_final,safety_ok,monotone_ok,f_local_ok,consensus_value\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.axis.name(),
                row.value,
                row.f,
                row.min_robustness
                    .map(|p| p.to_string())
                    .unwrap_or_default(),
                row.converged,
                row.psi_final,
                row.safety_ok,
                row.monotone_ok,
                row.f_local_ok,
                row.consensus_value
                    .map(|l| l.to_string())
                    .unwrap_or_default(),
            ));
        }
        out
    }
}

fn apply_axis(
    template: &ScenarioConfig,
    axis: SweepAxis,
    raw: &str,
) -> Result<ScenarioConfig, CliError> {
    let mut cfg = template.clone();
    match axis {
        SweepAxis::F => {
            let f: Fraction = raw
                .parse()
                .map_err(|e| CliError::Invalid(format!("axis value {raw:?}: {e}")))?;
            cfg.f = f;
        }
        SweepAxis::Topology => {
            if !cfg.topologies.contains_key(raw) {
                return Err(CliError::Invalid(format!(
                    "axis value {raw:?} names no topology in the scenario"
                )));
            }
            cfg.schedule.entries =
                vec![ScheduleEntry { t: 0.0, topology: raw.to_string() }];
        }
        SweepAxis::AdversaryCount => {
            let count: usize = raw
                .parse()
                .map_err(|_| CliError::Invalid(format!("axis value {raw:?} is not a count")))?;
            if count > cfg.adversaries.len() {
                return Err(CliError::Invalid(format!(
                    "adversary count {count} exceeds the template's {}",
                    cfg.adversaries.len()
                )));
            }
            // The first k assignments stay active; later slots become crash
            // nodes that never crash, which behave exactly like normal
            // agents.
            for assignment in cfg.adversaries.iter_mut().skip(count) {
                assignment.model = AdversaryModel::Crash(CrashBehavior {
                    crash_time: None,
                    fault_value: None,
                    initial_value: 0.5,
                });
            }
        }
        SweepAxis::Dwell => {
            let tau: f64 = raw
                .parse()
                .map_err(|_| CliError::Invalid(format!("axis value {raw:?} is not a time")))?;
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(CliError::Invalid(format!("dwell {tau} must be positive")));
            }
            // Periodic schedule cycling the template's distinct topologies in
            // first-appearance order, one switch every tau seconds.
            let mut cycle: Vec<String> = Vec::new();
            for entry in &cfg.schedule.entries {
                if !cycle.contains(&entry.topology) {
                    cycle.push(entry.topology.clone());
                }
            }
            if cycle.is_empty() {
                return Err(CliError::Invalid("template schedule is empty".into()));
            }
            let mut entries = Vec::new();
            let mut k = 0usize;
            loop {
                let t = k as f64 * tau;
                if t >= cfg.integration.horizon {
                    break;
                }
                entries.push(ScheduleEntry {
                    t,
                    topology: cycle[k % cycle.len()].clone(),
                });
                k += 1;
            }
            cfg.schedule.dwell = Some(tau);
            cfg.schedule.entries = entries;
        }
    }
    Ok(cfg)
}

fn thread_cap(points: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let capped = match std::env::var(THREADS_ENV) {
        Ok(raw) => raw.parse::<usize>().ok().filter(|n| *n >= 1).unwrap_or(1),
        Err(_) => available,
    };
    capped.min(points.max(1))
}

fn run_point(cfg: &ScenarioConfig, value: &str) -> Result<SweepRow, CliError> {
    let log = run_scenario(cfg)?;
    let summary = build_run_summary(cfg, &log);
    let min_robustness = summary.robustness.values().filter_map(|p| *p).min();
    Ok(SweepRow {
        value: value.to_string(),
        f: cfg.f,
        min_robustness,
        converged: summary.converged,
        psi_final: summary.psi_final,
        safety_ok: summary.safety_ok,
        monotone_ok: summary.monotone_ok,
        f_local_ok: summary.f_local_ok,
        consensus_value: summary.consensus_value,
    })
}

/// Runs one point per axis value; rows come back in axis order regardless of
/// which worker finished first.
pub fn sweep_template(
    template: &ScenarioConfig,
    axis: SweepAxis,
    values: &[String],
) -> Result<SweepOutput, CliError> {
    let points: Vec<ScenarioConfig> = values
        .iter()
        .map(|v| apply_axis(template, axis, v))
        .collect::<Result<_, _>>()?;

    let results: Mutex<Vec<Option<Result<SweepRow, CliError>>>> =
        Mutex::new((0..points.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = thread_cap(points.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= points.len() {
                    break;
                }
                let row = run_point(&points[idx], &values[idx]);
                results.lock().expect("sweep results lock")[idx] = Some(row);
            });
        }
    });

    let mut rows = Vec::with_capacity(points.len());
    for slot in results.into_inner().expect("sweep results lock") {
        rows.push(slot.expect("every point ran")?);
    }
    Ok(SweepOutput { axis, rows })
}

pub fn sweep(
    scenario_path: &Path,
    axis: SweepAxis,
    values: &[String],
) -> Result<SweepOutput, CliError> {
    let template = load_scenario(scenario_path)?;
    sweep_template(&template, axis, values)
}
