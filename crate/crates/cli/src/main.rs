//! `dwellsim`: scenario generation, single scheduling runs, Monte Carlo
//! sweeps, and policy comparisons from one binary.
//!
//! Configuration comes from a TOML file (`--config`, else the path in
//! `DWELLSIM_CONFIG`, else built-in defaults); command-line flags override
//! file values key by key. Exit codes: 0 success, 1 usage error, 2 data
//! error.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dwellsim::metrics::{metrics_for_run, CSV_COLUMNS};
use dwellsim::model::Placement;
use dwellsim::scenario::{
    generate_scenario, load_scenario_file, save_scenario_file, ScenarioConfig, WaitMode,
};
use dwellsim::scheduler::{run_horizon, Policy};
use dwellsim::sweep::{
    aggregate, aggregate_csv, compare, compare_csv, run_sweep, sweep_csv, SweepPlan,
};
use dwellsim::Result;

use config::RunConfig;

// --- argument surface ---------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "dwellsim",
    version,
    about = "Deterministic dwell-scheduling simulator and benchmark harness"
)]
struct Cli {
    /// TOML config file; falls back to $DWELLSIM_CONFIG, then to defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a replayable dwell-request stream.
    Generate(GenerateArgs),
    /// Schedule one scenario and print a metrics row.
    Run(RunArgs),
    /// Run the policy x load x repetition grid and write CSV tables.
    Sweep(SweepArgs),
    /// Sweep two policies and print their metric-delta table.
    Compare(CompareArgs),
}

/// Scenario knobs shared by every subcommand that generates a stream.
#[derive(Args)]
struct ScenarioOverrides {
    /// Stream seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Fine-tracking target count.
    #[arg(long)]
    n_precision: Option<usize>,
    /// Coarse-tracking target count.
    #[arg(long)]
    n_general: Option<usize>,
    /// Simulated span, ms.
    #[arg(long)]
    horizon: Option<f64>,
    /// Wait-duration policy: table_fixed | range_derived.
    #[arg(long)]
    wait: Option<WaitMode>,
    /// Confirmation arrivals per second.
    #[arg(long)]
    verify_rate: Option<f64>,
    /// Scan streams per search mode.
    #[arg(long)]
    search_streams: Option<usize>,
}

impl ScenarioOverrides {
    fn apply(&self, s: &mut ScenarioConfig) {
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.n_precision {
            s.n_precision = v;
        }
        if let Some(v) = self.n_general {
            s.n_general = v;
        }
        if let Some(v) = self.horizon {
            s.horizon = v;
        }
        if let Some(v) = self.wait {
            s.wait_mode = v;
        }
        if let Some(v) = self.verify_rate {
            s.verify_rate_hz = v;
        }
        if let Some(v) = self.search_streams {
            s.search_streams = v;
        }
    }
}

/// Grid knobs shared by `sweep` and `compare`.
#[derive(Args)]
struct GridOverrides {
    /// Low end of the fine-tracking load axis.
    #[arg(long)]
    from: Option<usize>,
    /// High end of the load axis.
    #[arg(long)]
    to: Option<usize>,
    /// Load-axis step.
    #[arg(long)]
    step: Option<usize>,
    /// Repetitions per load.
    #[arg(long)]
    reps: Option<usize>,
    /// Root seed for per-cell seed derivation.
    #[arg(long)]
    base_seed: Option<u64>,
    /// Full-resolution grid (step 10, 100 reps); explicit flags still win.
    #[arg(long)]
    full: bool,
    /// Directory for the CSV artifacts.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

impl GridOverrides {
    fn apply(&self, plan: &mut SweepPlan) {
        if self.full {
            plan.precision_step = 10;
            plan.reps = 100;
        }
        if let Some(v) = self.from {
            plan.precision_from = v;
        }
        if let Some(v) = self.to {
            plan.precision_to = v;
        }
        if let Some(v) = self.step {
            plan.precision_step = v;
        }
        if let Some(v) = self.reps {
            plan.reps = v;
        }
        if let Some(v) = self.base_seed {
            plan.base_seed = v;
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Destination file (default: output dir + configured name).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    scenario: ScenarioOverrides,
}

#[derive(Args)]
struct RunArgs {
    /// Replay this scenario file instead of generating one.
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Scheduling policy.
    #[arg(long, default_value = "synthesis_interleave")]
    policy: Policy,
    /// Also dump every placement to this CSV file.
    #[arg(long, value_name = "PATH")]
    timeline: Option<PathBuf>,
    #[command(flatten)]
    overrides: ScenarioOverrides,
}

#[derive(Args)]
struct SweepArgs {
    /// Policies to sweep (comma-separated); default: the config list.
    #[arg(long, value_delimiter = ',')]
    policies: Vec<Policy>,
    #[command(flatten)]
    grid: GridOverrides,
    #[command(flatten)]
    scenario: ScenarioOverrides,
}

#[derive(Args)]
struct CompareArgs {
    /// Policy under test.
    #[arg(long, default_value = "synthesis_interleave")]
    candidate: Policy,
    /// Reference policy.
    #[arg(long, default_value = "hpedf_pointer")]
    baseline: Policy,
    #[command(flatten)]
    grid: GridOverrides,
    #[command(flatten)]
    scenario: ScenarioOverrides,
}

// --- entry ----------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = load_config(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Generate(args) => cmd_generate(&cfg, &args),
        Command::Run(args) => cmd_run(&cfg, &args),
        Command::Sweep(args) => cmd_sweep(&cfg, &args),
        Command::Compare(args) => cmd_compare(&cfg, &args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Flag > environment > built-in defaults.
fn load_config(flag: Option<&Path>) -> Result<RunConfig> {
    if let Some(path) = flag {
        return RunConfig::load(path);
    }
    match std::env::var("DWELLSIM_CONFIG") {
        Ok(path) if !path.is_empty() => RunConfig::load(Path::new(&path)),
        _ => Ok(RunConfig::default()),
    }
}

// --- subcommands -----------------------------------------------------------------

fn cmd_generate(cfg: &RunConfig, args: &GenerateArgs) -> Result<()> {
    let mut scenario = cfg.scenario.clone();
    args.scenario.apply(&mut scenario);
    scenario.validate()?;
    let tasks = generate_scenario(&scenario);
    let out = args.out.clone().unwrap_or_else(|| cfg.output.scenario_path());
    ensure_parent(&out)?;
    save_scenario_file(&out, &scenario, &tasks)?;
    println!("wrote {} requests to {}", tasks.len(), out.display());
    Ok(())
}

fn cmd_run(cfg: &RunConfig, args: &RunArgs) -> Result<()> {
    let mut scenario = cfg.scenario.clone();
    args.overrides.apply(&mut scenario);
    scenario.validate()?;
    let (tasks, seed, n_precision) = match &args.scenario {
        Some(path) => {
            let tasks = load_scenario_file(path)?;
            let banner = scenario_banner(path);
            if args.overrides.horizon.is_none() {
                if let Some(h) = banner.horizon {
                    scenario.horizon = h;
                }
            }
            (
                tasks,
                banner.seed.unwrap_or(scenario.seed),
                banner.precision.unwrap_or(scenario.n_precision),
            )
        }
        None => (generate_scenario(&scenario), scenario.seed, scenario.n_precision),
    };
    let run = run_horizon(&tasks, scenario.horizon, &cfg.scheduler, args.policy)?;
    let report = metrics_for_run(&tasks, &run, scenario.horizon, cfg.metrics.yield_k);

    let mut header: Vec<&str> = vec!["policy", "seed", "n_precision"];
    header.extend(CSV_COLUMNS);
    println!("{}", header.join(","));
    let mut fields = vec![args.policy.label().to_string(), seed.to_string(), n_precision.to_string()];
    fields.extend(report.csv_fields());
    println!("{}", fields.join(","));

    if let Some(path) = &args.timeline {
        ensure_parent(path)?;
        std::fs::write(path, timeline_csv(&run.placements))?;
        eprintln!("timeline: {} placements -> {}", run.placements.len(), path.display());
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, args: &SweepArgs) -> Result<()> {
    let mut plan = cfg.sweep_plan();
    args.scenario.apply(&mut plan.scenario);
    args.grid.apply(&mut plan);
    if !args.policies.is_empty() {
        let mut unique = Vec::new();
        for p in &args.policies {
            if !unique.contains(p) {
                unique.push(*p);
            }
        }
        plan.policies = unique;
    }
    plan.validate()?;

    let rows = run_sweep(&plan)?;
    let aggregates = aggregate(&rows);
    let dir = args.grid.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    std::fs::create_dir_all(&dir)?;
    let raw_path = dir.join(&cfg.output.raw_csv);
    std::fs::write(&raw_path, sweep_csv(&rows))?;
    let agg_path = dir.join(&cfg.output.aggregate_csv);
    std::fs::write(&agg_path, aggregate_csv(&aggregates))?;
    println!("{} cells -> {}", rows.len(), raw_path.display());
    println!("{} aggregate rows -> {}", aggregates.len(), agg_path.display());
    Ok(())
}

fn cmd_compare(cfg: &RunConfig, args: &CompareArgs) -> Result<()> {
    let mut plan = cfg.sweep_plan();
    args.scenario.apply(&mut plan.scenario);
    args.grid.apply(&mut plan);
    plan.policies = vec![args.candidate];
    if args.baseline != args.candidate {
        plan.policies.push(args.baseline);
    }
    plan.validate()?;

    let rows = run_sweep(&plan)?;
    let aggregates = aggregate(&rows);
    let table = compare(&aggregates, args.candidate, args.baseline);
    let csv = compare_csv(&table);
    print!("{csv}");
    let dir = args.grid.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(&cfg.output.compare_csv);
    std::fs::write(&path, csv)?;
    eprintln!("delta table -> {}", path.display());
    Ok(())
}

// --- helpers ---------------------------------------------------------------------

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

/// One placement per line: task id, mode, start, host (empty when standalone),
/// placement kind.
fn timeline_csv(placements: &[Placement]) -> String {
    let mut out = String::from("task_id,mode,t_s,host_id,mode_used\n");
    for p in placements {
        let host = p.host_id.map(|h| h.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.task_id,
            p.mode.label(),
            p.t_s,
            host,
            p.kind.label()
        ));
    }
    out
}

/// Metadata a scenario file's banner comment carries about its origin.
#[derive(Debug, Default, PartialEq)]
struct Banner {
    seed: Option<u64>,
    precision: Option<usize>,
    horizon: Option<f64>,
}

/// Reads `seed=… precision=… horizon=…` from the first banner comment, when
/// present; hand-built files without one simply leave the fields unset.
fn scenario_banner(path: &Path) -> Banner {
    let Ok(text) = std::fs::read_to_string(path) else {
        return Banner::default();
    };
    let mut banner = Banner::default();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || !line.starts_with('#') {
            break;
        }
        for token in line.trim_start_matches('#').split_whitespace() {
            if let Some(v) = token.strip_prefix("seed=") {
                banner.seed = v.parse().ok();
            } else if let Some(v) = token.strip_prefix("precision=") {
                banner.precision = v.parse().ok();
            } else if let Some(v) = token.strip_prefix("horizon=") {
                banner.horizon = v.parse().ok();
            }
        }
    }
    banner
}
