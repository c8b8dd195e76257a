use std::path::PathBuf;
use std::process::ExitCode;

use arcp_cli::{
    counterexample, robustness, simulate, sweep, CliError, SweepAxis, EXIT_CONFIG_ERROR,
};
use arcp_core::{Fraction, NodeSet};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "arcp")]
#[command(about = "Resilient consensus simulator and fractional robustness analyzer")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    /// Override the removal fraction f per point
    F,
    /// Pin the schedule to one named topology per point
    Topology,
    /// Keep the first k adversary assignments active; later slots never
    /// crash and so behave like normal agents
    AdversaryCount,
    /// Rebuild a periodic schedule switching every tau seconds
    Dwell,
}

impl From<AxisArg> for SweepAxis {
    fn from(axis: AxisArg) -> Self {
        match axis {
            AxisArg::F => SweepAxis::F,
            AxisArg::Topology => SweepAxis::Topology,
            AxisArg::AdversaryCount => SweepAxis::AdversaryCount,
            AxisArg::Dwell => SweepAxis::Dwell,
        }
    }
}

#[derive(Subcommand)]
enum Commands {
    /// Analyze the fractional robustness of a digraph file
    Robustness {
        /// Graph JSON file
        graph: PathBuf,

        /// Fraction p to test, e.g. --p 1/2 (repeatable)
        #[arg(long = "p", value_name = "FRAC")]
        ps: Vec<String>,

        /// Node set for a reachability query, e.g. --set 0,1 (repeatable)
        #[arg(long = "set", value_name = "IDS")]
        sets: Vec<String>,

        /// Also write the report as JSON to this path
        #[arg(long)]
        json: Option<PathBuf>,
    },

    /// Run a scenario: trajectory CSV, summary JSON, gnuplot data + script
    Simulate {
        /// Scenario JSON file
        scenario: PathBuf,

        /// Output directory
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },

    /// Generate and verify a non-convergence scenario for a graph that is
    /// not f-fraction robust
    Counterexample {
        /// Graph JSON file
        graph: PathBuf,

        /// Removal fraction f, e.g. 1/3
        #[arg(long, value_name = "FRAC")]
        f: String,

        /// Output directory
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },

    /// Re-run a scenario template across one axis and print a CSV table
    Sweep {
        /// Scenario JSON file used as the template
        scenario: PathBuf,

        /// Axis to sweep
        #[arg(long, value_enum)]
        axis: AxisArg,

        /// Comma-separated axis values (fractions, topology names, counts,
        /// or seconds, depending on the axis)
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,

        /// Write the table to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_fractions(raw: &[String]) -> Result<Vec<Fraction>, CliError> {
    raw.iter()
        .map(|s| {
            s.parse::<Fraction>()
                .map_err(|e| CliError::Invalid(format!("--p {s:?}: {e}")))
        })
        .collect()
}

fn parse_sets(raw: &[String]) -> Result<Vec<NodeSet>, CliError> {
    raw.iter()
        .map(|s| {
            s.parse::<NodeSet>()
                .map_err(|e| CliError::Invalid(format!("--set {s:?}: {e}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Commands::Robustness { graph, ps, sets, json } => {
            let report = robustness(&graph, &parse_fractions(&ps)?, &parse_sets(&sets)?)?;
            print!("{}", report.render());
            if let Some(path) = json {
                std::fs::write(&path, report.to_json())?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Commands::Simulate { scenario, out_dir } => {
            let output = simulate(&scenario, &out_dir)?;
            print!("{}", output.render());
            eprintln!("wall time: {:.3} s", output.wall_seconds);
            Ok(output.exit_code)
        }
        Commands::Counterexample { graph, f, out_dir } => {
            let f: Fraction = f
                .parse()
                .map_err(|e| CliError::Invalid(format!("--f: {e}")))?;
            let output = counterexample(&graph, f, &out_dir)?;
            print!("{}", output.render());
            Ok(output.exit_code)
        }
        Commands::Sweep { scenario, axis, values, out } => {
            let output = sweep(&scenario, axis.into(), &values)?;
            let table = output.to_csv();
            match out {
                Some(path) => {
                    std::fs::write(&path, &table)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{table}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_CONFIG_ERROR as u8)
        }
    }
}
