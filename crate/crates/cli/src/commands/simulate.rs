//! Scenario execution with file exports and scriptable exit codes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use arcp_core::{
    build_run_summary, gnuplot_script, load_scenario, run_scenario, summary_to_json,
    trajectory_to_csv, trajectory_to_dat, RunSummary, TrajectoryLog,
};

use crate::{CliError, EXIT_NON_CONVERGED, EXIT_OK, EXIT_SAFETY_VIOLATION};

#[derive(Debug)]
pub struct SimulateOutput {
    pub summary: RunSummary,
    pub log: TrajectoryLog,
    pub exit_code: i32,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub dat_path: PathBuf,
    pub plt_path: PathBuf,
    /// Reported on stderr only; never serialized, to keep outputs
    /// byte-stable across runs.
    pub wall_seconds: f64,
}

impl SimulateOutput {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let s = &self.summary;
        out.push_str(&format!(
            "converged: {}{}\n",
            s.converged,
            s.consensus_value
                .map(|l| format!(" (consensus value {l})"))
                .unwrap_or_default()
        ));
        out.push_str(&format!("psi_final: {:e}\n", s.psi_final));
        out.push_str(&format!("safety_ok: {}\n", s.safety_ok));
        out.push_str(&format!("monotone_ok: {}\n", s.monotone_ok));
        out.push_str(&format!("rate_bound_ok: {}\n", s.rate_bound_ok));
        out.push_str(&format!("f_local_ok: {}\n", s.f_local_ok));
        for (name, p) in &s.robustness {
            match p {
                Some(p) => out.push_str(&format!("robustness[{name}]: {p}\n")),
                None => out.push_str(&format!("robustness[{name}]: n/a (beyond cap)\n")),
            }
        }
        for path in [&self.csv_path, &self.summary_path, &self.dat_path, &self.plt_path] {
            out.push_str(&format!("wrote {}\n", path.display()));
        }
        out
    }
}

/// Exit code for a finished run: safety violations beat non-convergence.
pub fn exit_code_for(summary: &RunSummary) -> i32 {
    if !summary.safety_ok {
        EXIT_SAFETY_VIOLATION
    } else if !summary.converged {
        EXIT_NON_CONVERGED
    } else {
        EXIT_OK
    }
}

pub fn simulate(scenario_path: &Path, out_dir: &Path) -> Result<SimulateOutput, CliError> {
    let cfg = load_scenario(scenario_path)?;
    let stem = scenario_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario")
        .to_string();

    let started = Instant::now();
    let log = run_scenario(&cfg)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    let summary = build_run_summary(&cfg, &log);

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{stem}_trajectory.csv"));
    let summary_path = out_dir.join(format!("{stem}_summary.json"));
    let dat_path = out_dir.join(format!("{stem}.dat"));
    let plt_path = out_dir.join(format!("{stem}.plt"));

    std::fs::write(&csv_path, trajectory_to_csv(&log))?;
    std::fs::write(&summary_path, summary_to_json(&summary))?;
    std::fs::write(&dat_path, trajectory_to_dat(&log))?;
    let dat_name = dat_path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("trajectory.dat");
    std::fs::write(&plt_path, gnuplot_script(dat_name, &log, &stem))?;

    let exit_code = exit_code_for(&summary);
    Ok(SimulateOutput {
        summary,
        log,
        exit_code,
        csv_path,
        summary_path,
        dat_path,
        plt_path,
        wall_seconds,
    })
}
