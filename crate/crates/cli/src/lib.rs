//! Subcommands behind the `rpa-mppi` binary.
//!
//! Each `cmd_*` function takes parsed arguments and a writer for the human
//! or JSON report, and returns the process exit code: 0 on success, 1 on an
//! infrastructure failure, 2 on a configuration error and 3 when `verify`
//! finds a property violation.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rpa_mppi::analysis::{certify, AnalysisScene, CertificationReport};
use rpa_mppi::benchmark::{
    export_results, misspecified_scenario, paper_suite, run_labeled_trial, run_suite, suite_worlds, trajectory_text,
    MetricsTable, SuiteConfig, SuiteOptions, TrialLabels, TrialResult,
};
use rpa_mppi::{CostMode, Error, PlannerKind, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rpa-mppi", version, about = "MPPI navigation with repulsive potential augmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run closed-loop trials from a scenario file.
    Run(RunArgs),
    /// Run the planner comparison suite and export metrics, trajectories and plots.
    Bench(BenchArgs),
    /// Check the properties of the repulsive cost on the analysis scene.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for trials and grid searches (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Print a machine-readable JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario TOML file.
    #[arg(long)]
    pub config: PathBuf,
    /// Planner override: std, astar or rpa.
    #[arg(long)]
    pub planner: Option<PlannerKind>,
    /// MPPI horizon override (steps).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Repulsion weight override.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Run only this initial state (index into `initial_states`).
    #[arg(long)]
    pub state: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Suite TOML file; the built-in three-scenario suite when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Keep only scenarios whose id contains this string.
    #[arg(long)]
    pub filter: Option<String>,
    /// Keep only planners of this kind.
    #[arg(long)]
    pub planner: Option<PlannerKind>,
    /// Horizon override for every planner.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Repulsion weight override.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Add the long-wall scenario with a shifted local-minimum estimate.
    #[arg(long)]
    pub misspecified: bool,
    /// Leave CT columns empty so the outputs depend only on the seeds.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Analysis scene TOML file; the default scene when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Repulsion weight override.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Obstacle width override.
    #[arg(long)]
    pub width: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("cannot write report: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_config_error() => EXIT_CONFIG,
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_FAILURE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let code = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match code {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn init_workers(workers: Option<usize>) -> CliResult<()> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        // A pool already exists when a command runs twice in one process.
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialized; --workers ignored");
        }
    }
    Ok(())
}

/// Applies command-line overrides on top of a loaded scenario.
pub fn apply_run_overrides(mut cfg: ScenarioConfig, args: &RunArgs) -> CliResult<ScenarioConfig> {
    if let Some(kind) = args.planner {
        cfg.planner = kind;
        cfg.cost.mode = if kind == PlannerKind::RpaMppi {
            CostMode::Rpa
        } else {
            CostMode::Baseline
        };
        if kind == PlannerKind::AstarMppi && cfg.astar.is_none() {
            cfg.astar = Some(Default::default());
        }
    }
    if let Some(h) = args.horizon {
        cfg.mppi.horizon = h;
    }
    if let Some(a) = args.alpha {
        cfg.cost.alpha = a;
    }
    if let Some(s) = args.common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct TrialSummary<'a> {
    scenario: &'a str,
    planner: &'a str,
    horizon: usize,
    alpha: f64,
    seed: u64,
    state_index: usize,
    initial: [f64; 3],
    outcome: rpa_mppi::Outcome,
    success_time: Option<f64>,
    path_length: f64,
    steps: usize,
    mean_opt_time: Option<f64>,
    guidance_time: f64,
    final_state: [f64; 3],
    trajectory_file: Option<PathBuf>,
}

pub fn cmd_run(args: &RunArgs, out: &mut impl Write) -> CliResult<i32> {
    init_workers(args.common.workers)?;
    let cfg = apply_run_overrides(ScenarioConfig::load(&args.config)?, args)?;
    let indices: Vec<usize> = match args.state {
        Some(i) if i >= cfg.initial_states.len() => {
            return Err(CliError::Config(format!(
                "--state {i} out of range ({} initial states)",
                cfg.initial_states.len()
            )))
        }
        Some(i) => vec![i],
        None => (0..cfg.initial_states.len()).collect(),
    };
    if indices.is_empty() {
        return Err(CliError::Config("scenario has no initial states".into()));
    }
    let out_dir = args.common.out.clone();
    let mut summaries = Vec::new();
    let mut results: Vec<TrialResult> = Vec::new();
    for &i in &indices {
        let labels = TrialLabels {
            scenario: cfg.name.clone(),
            planner: cfg.planner.label().to_string(),
            state_index: i,
        };
        let r = run_labeled_trial(&cfg, cfg.initial_states[i], cfg.seed, &labels)?;
        let file = match &out_dir {
            Some(dir) => Some(write_file(
                &dir.join(format!("{}_{}_s{:02}.csv", cfg.name, planner_slug(cfg.planner), i)),
                &trajectory_text(&r),
            )?),
            None => None,
        };
        results.push(r);
        let r = results.last().expect("just pushed");
        summaries.push(TrialSummary {
            scenario: &cfg.name,
            planner: cfg.planner.label(),
            horizon: cfg.mppi.horizon,
            alpha: cfg.cost.alpha,
            seed: cfg.seed,
            state_index: i,
            initial: [r.initial.x, r.initial.y, r.initial.theta],
            outcome: r.outcome,
            success_time: r.success_time,
            path_length: r.path_length,
            steps: r.steps,
            mean_opt_time: r.mean_opt_time(),
            guidance_time: r.guidance_time,
            final_state: [r.final_state.x, r.final_state.y, r.final_state.theta],
            trajectory_file: file,
        });
    }
    if args.common.json {
        writeln!(out, "{}", to_json(&summaries)?)?;
    } else {
        for s in &summaries {
            let time = s.success_time.map_or("-".to_string(), |t| format!("{t:.1}"));
            let ct = s.mean_opt_time.map_or("-".to_string(), |t| format!("{:.2}", t * 1e3));
            writeln!(
                out,
                "{} planner={} horizon={} alpha={} seed={} state={} start=({:.2},{:.2},{:.3}) outcome={:?} time={} s path={:.2} m steps={} ct={} ms",
                s.scenario,
                s.planner,
                s.horizon,
                s.alpha,
                s.seed,
                s.state_index,
                s.initial[0],
                s.initial[1],
                s.initial[2],
                s.outcome,
                time,
                s.path_length,
                s.steps,
                ct
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn planner_slug(kind: PlannerKind) -> &'static str {
    match kind {
        PlannerKind::StdMppi => "std",
        PlannerKind::AstarMppi => "astar",
        PlannerKind::RpaMppi => "rpa",
    }
}

/// Loads (or builds) the suite and applies command-line overrides.
pub fn bench_suite(args: &BenchArgs) -> CliResult<SuiteConfig> {
    let mut suite = match &args.config {
        Some(p) => SuiteConfig::load(p)?,
        None => paper_suite(vec![0, 1, 2]),
    };
    if args.misspecified && !suite.scenarios.iter().any(|s| s.id == misspecified_scenario().id) {
        suite.scenarios.push(misspecified_scenario());
    }
    if let Some(f) = &args.filter {
        suite = suite.filtered(f);
        if suite.scenarios.is_empty() {
            return Err(CliError::Config(format!("--filter '{f}' matches no scenario")));
        }
    }
    if let Some(kind) = args.planner {
        // The reference planner stays so the relative metrics are defined.
        suite
            .planners
            .retain(|p| p.kind == kind || p.kind == PlannerKind::AstarMppi);
    }
    if let Some(h) = args.horizon {
        for p in &mut suite.planners {
            p.horizon = h;
        }
    }
    if let Some(a) = args.alpha {
        suite.alpha = a;
    }
    if let Some(s) = args.common.seed {
        let n = suite.seeds.len() as u64;
        suite.seeds = (s..s + n).collect();
    }
    suite.validate()?;
    Ok(suite)
}

#[derive(Debug, Serialize)]
struct BenchReport<'a> {
    trials: usize,
    wall_time: f64,
    out_dir: &'a Path,
    table: &'a MetricsTable,
}

pub fn cmd_bench(args: &BenchArgs, out: &mut impl Write) -> CliResult<i32> {
    init_workers(args.common.workers)?;
    let suite = bench_suite(args)?;
    let out_dir = args.common.out.clone().unwrap_or_else(|| PathBuf::from("out/bench"));
    let start = Instant::now();
    let results = run_suite(
        &suite,
        SuiteOptions {
            timing: !args.no_timing,
        },
    )?;
    let wall_time = start.elapsed().as_secs_f64();
    export_results(&results.table, &results.trials, &suite_worlds(&suite), &out_dir)?;
    if args.common.json {
        let report = BenchReport {
            trials: results.trials.len(),
            wall_time,
            out_dir: &out_dir,
            table: &results.table,
        };
        writeln!(out, "{}", to_json(&report)?)?;
    } else {
        write_table(out, &results.table)?;
        writeln!(
            out,
            "{} trials in {:.1} s; results in {}",
            results.trials.len(),
            wall_time,
            out_dir.display()
        )?;
    }
    Ok(EXIT_OK)
}

fn write_table(out: &mut impl Write, table: &MetricsTable) -> std::io::Result<()> {
    let opt = |v: Option<f64>, scale: f64, prec: usize| v.map_or("-".to_string(), |x| format!("{:.*}", prec, x * scale));
    writeln!(
        out,
        "{:<24} {:<10} {:>4} {:>6} {:>8} {:>8} {:>9} {:>9}",
        "scenario", "planner", "T", "SR", "RDST", "RDPL", "CT[ms]", "+guide"
    )?;
    for r in &table.rows {
        writeln!(
            out,
            "{:<24} {:<10} {:>4} {:>6.1} {:>8} {:>8} {:>9} {:>9}",
            r.scenario,
            r.planner,
            r.horizon,
            r.sr,
            opt(r.rdst, 1.0, 1),
            opt(r.rdpl, 1.0, 1),
            opt(r.ct, 1e3, 3),
            opt(r.total_ct, 1e3, 3),
        )?;
    }
    writeln!(out, "note: {}", table.note)
}

pub fn verify_scene(args: &VerifyArgs) -> CliResult<AnalysisScene> {
    let mut scene = match &args.config {
        Some(p) => AnalysisScene::load(p)?,
        None => AnalysisScene::default(),
    };
    if let Some(a) = args.alpha {
        scene.alpha = a;
    }
    if let Some(w) = args.width {
        scene.width = w;
    }
    if let Some(s) = args.common.seed {
        scene.seed = s;
    }
    scene.validate()?;
    Ok(scene)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> CliResult<i32> {
    init_workers(args.common.workers)?;
    let scene = verify_scene(args)?;
    let start = Instant::now();
    let report = certify(&scene)?;
    let elapsed = start.elapsed().as_secs_f64();
    if let Some(dir) = &args.common.out {
        write_file(&dir.join("verify.json"), &to_json(&report)?)?;
    }
    if args.common.json {
        writeln!(out, "{}", to_json(&report)?)?;
    } else {
        write_certification(out, &report, elapsed)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_PROPERTY })
}

fn write_certification(out: &mut impl Write, report: &CertificationReport, elapsed: f64) -> std::io::Result<()> {
    let s = &report.scene;
    writeln!(
        out,
        "scene: y_goal={} W={} H={} alpha={} (half-width bound {:.6})",
        s.y_goal,
        s.width,
        s.height,
        s.alpha,
        rpa_mppi::analysis::half_width_bound(s.y_goal, s.alpha)
    )?;
    writeln!(out, "sign convention: {}", report.sign_resolution)?;
    for conv in &report.conventions {
        let adopted = if conv.repulsion == report.adopted { " (adopted)" } else { "" };
        writeln!(out, "[{:?}{adopted}]", conv.repulsion)?;
        for check in std::iter::once(&conv.feasibility).chain(&conv.properties) {
            writeln!(
                out,
                "  {} {}: {} ({} samples, {} violations)",
                if check.passed { "PASS" } else { "FAIL" },
                check.name,
                check.detail,
                check.samples,
                check.violations
            )?;
            for p in &check.counterexamples {
                writeln!(out, "      counterexample ({:.4}, {:.4})", p.x, p.y)?;
            }
        }
        let g = &conv.gradient;
        writeln!(
            out,
            "  {} gradient: max rel. error {:.2e} over {} points (tol {:.0e})",
            if g.passed { "PASS" } else { "FAIL" },
            g.max_relative_error,
            g.samples,
            g.tolerance
        )?;
        for m in &conv.minima {
            writeln!(out, "  minima at {} m: {}", m.grid_resolution, describe_minima(m))?;
        }
    }
    for (m, trap) in report.baseline.minima.iter().zip(&report.baseline.trap_nodes) {
        writeln!(
            out,
            "[baseline] minima at {} m: {} (trap node ({:.2}, {:.2}))",
            m.grid_resolution,
            describe_minima(m),
            trap.x,
            trap.y
        )?;
    }
    writeln!(
        out,
        "{}: adopted convention {} all properties; baseline {} the local minimum near the origin ({:.1} s)",
        if report.passed() { "PASS" } else { "FAIL" },
        if report.adopted_report().all_passed() { "passes" } else { "fails" },
        if report.baseline.passed() { "shows" } else { "does not show" },
        elapsed
    )
}

fn describe_minima(m: &rpa_mppi::analysis::MinimaReport) -> String {
    let list: Vec<String> = m
        .minima
        .iter()
        .map(|e| {
            format!(
                "({:.2}, {:.2}){}",
                e.point.x,
                e.point.y,
                if e.is_global { " global" } else { "" }
            )
        })
        .collect();
    format!("{} [{}]", m.minima.len(), list.join(", "))
}

fn to_json(v: &impl Serialize) -> CliResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Output(std::io::Error::other(e)))
}

fn write_file(path: &Path, contents: &str) -> CliResult<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}
