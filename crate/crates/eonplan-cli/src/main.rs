//! Command line front end: runs one planning study per (scheme, seed),
//! writes per-run CSVs plus merged figure data and a seed summary.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eonplan_core::{
    report, GrowthProfile, PhyParams, Planner, PlannerConfig, Scheme, StudyOutcome, Topology,
};

#[derive(Debug, Parser)]
#[command(
    name = "eonplan",
    version,
    about = "Multi-period elastic optical network planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a multi-period planning study and write CSV artifacts.
    Plan(PlanArgs),
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Topology file, or a bundled name (germany17, abilene12).
    #[arg(long)]
    topology: String,
    /// Growth scenario: expected, unexpected or custom:FILE.
    #[arg(long, default_value = "expected")]
    scenario: String,
    /// Planning scheme: 1 (upgrades first), 2 (additions only) or both.
    #[arg(long, default_value = "both", value_parser = ["1", "2", "both"])]
    scheme: String,
    /// Candidate paths per demand.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// RNG seed for the probabilistic routing.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated seed list; overrides --seed.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Last planning year, inclusive (defaults to the profile's last year,
    /// 2030 for the built-in scenarios).
    #[arg(long)]
    horizon: Option<i32>,
    /// Light a dark fiber pair on links flagged by the saturation check.
    #[arg(long, default_value_t = false)]
    auto_physical_upgrade: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// JSON file overriding the physical-layer parameters.
    #[arg(long)]
    phy_config: Option<PathBuf>,
    /// Permitted per-demand over-provisioning, Gbps.
    #[arg(long, default_value_t = 100.0)]
    delta: f64,
    /// Occupancy fraction that triggers the saturation warning.
    #[arg(long, default_value_t = 0.75)]
    saturation_threshold: f64,
}

enum CliError {
    /// Unreadable or unwritable files.
    Io(String),
    /// Inputs that parsed but cannot be planned on.
    Input(String),
}

impl From<eonplan_core::Error> for CliError {
    fn from(err: eonplan_core::Error) -> Self {
        match err {
            eonplan_core::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own usage text
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    let Command::Plan(args) = cli.command;
    match run_plan(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_topology(name: &str) -> Result<(Topology, String), CliError> {
    let path = Path::new(name);
    if path.exists() {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| name.to_string());
        return Ok((Topology::from_path(path)?, label));
    }
    if let Some(topo) = Topology::builtin(name) {
        return Ok((topo, name.to_string()));
    }
    Err(CliError::Io(format!(
        "topology {name:?} is neither a readable file nor a bundled name"
    )))
}

fn load_profile(scenario: &str) -> Result<GrowthProfile, CliError> {
    if let Some(profile) = GrowthProfile::scenario(scenario) {
        return Ok(profile);
    }
    if let Some(path) = scenario.strip_prefix("custom:") {
        return Ok(GrowthProfile::from_path(Path::new(path))?);
    }
    // a bare profile file also works
    if Path::new(scenario).exists() {
        return Ok(GrowthProfile::from_path(Path::new(scenario))?);
    }
    Err(CliError::Input(format!(
        "scenario must be expected, unexpected or custom:<path>, got {scenario:?}"
    )))
}

fn run_plan(args: &PlanArgs) -> Result<(), CliError> {
    let (topology, topology_name) = load_topology(&args.topology)?;
    let profile = load_profile(&args.scenario)?;
    let phy = match &args.phy_config {
        Some(path) => PhyParams::from_path(path)?,
        None => PhyParams::default(),
    };
    let schemes = match args.scheme.as_str() {
        "1" => vec![Scheme::Upgrading],
        "2" => vec![Scheme::AddOnly],
        _ => vec![Scheme::Upgrading, Scheme::AddOnly],
    };
    let seeds = args.seeds.clone().unwrap_or_else(|| vec![args.seed]);

    let mut outcomes: Vec<StudyOutcome> = Vec::new();
    for &scheme in &schemes {
        for &seed in &seeds {
            let cfg = PlannerConfig {
                scheme,
                delta_gbps: args.delta,
                saturation_threshold: args.saturation_threshold,
                auto_physical_upgrade: args.auto_physical_upgrade,
                k: args.k,
                seed,
                horizon_year: args.horizon,
            };
            let planner = Planner::new(topology.clone(), phy.clone(), profile.clone(), cfg)?;
            let outcome = planner.run_study()?;
            let run_dir = args
                .out
                .join(format!("scheme{}_seed{}", scheme.number(), seed));
            report::write_study_csvs(&outcome, &run_dir)?;
            let last = outcome.reports.last().expect("at least one period");
            println!(
                "scheme {} seed {}: {} periods, carried {:.3} of {:.3} Tbps at {}, {} BVTs -> {}",
                scheme.number(),
                seed,
                outcome.reports.len(),
                last.carried_tbps,
                last.offered_tbps,
                last.year,
                last.bvt_count,
                run_dir.display()
            );
            outcomes.push(outcome);
        }
    }

    std::fs::create_dir_all(&args.out)?;
    std::fs::write(
        args.out.join("fig_throughput.csv"),
        report::fig_throughput_csv(&outcomes),
    )?;
    std::fs::write(
        args.out.join("fig_bvt_vs_throughput.csv"),
        report::fig_bvt_vs_throughput_csv(&outcomes, &topology_name),
    )?;
    std::fs::write(
        args.out.join("summary.txt"),
        report::summary_text(&outcomes),
    )?;
    Ok(())
}
