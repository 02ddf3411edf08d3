//! Closed-loop navigation trials and the planner comparison suite.
//!
//! A trial runs plan → apply first input → simulate until the robot is
//! within the goal tolerance, enters an inflated obstacle, or runs out of
//! time. The suite runs every (scenario, planner, initial state, seed)
//! combination and aggregates success rate (SR), mean relative difference
//! in success time (RDST) and path length (RDPL) against the A*-guided
//! reference over commonly solved trials, and mean optimization time per
//! step (CT).
//!
//! The built-in scenario geometry ([`paper_suite`]) is a reconstruction:
//! bounds, obstacle extents and goal location are chosen to match the
//! published figure layout, not taken from published numbers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{
    AStarParams, Control, CostParams, MppiParams, PlannerKind, Point, Rect, RectObstacle, ScenarioConfig,
    State, World, DEFAULT_ALPHA, DEFAULT_W_OBST,
};
use crate::dynamics::step;
use crate::error::{Error, Result};
use crate::mppi::MppiPlanner;
use crate::planners::{plan_reference_path, SubgoalTracker};

pub const GEOMETRY_NOTE: &str =
    "scenario geometry (bounds, obstacle sizes, goal) is a reconstruction, not published ground truth";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Timeout,
    Collision,
}

/// One line of an executed trajectory: the state at `t` and the input
/// applied from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub scenario: String,
    pub planner: String,
    pub kind: PlannerKind,
    pub horizon: usize,
    pub state_index: usize,
    pub initial: State,
    pub seed: u64,
    pub outcome: Outcome,
    pub success_time: Option<f64>,
    pub path_length: f64,
    /// Number of planning steps executed.
    pub steps: usize,
    /// Sum of per-step optimization wall time, seconds.
    pub optimization_time: f64,
    /// Reference-path search and subgoal selection wall time, seconds.
    pub guidance_time: f64,
    pub final_state: State,
    pub trajectory: Vec<TrajectorySample>,
}

impl TrialResult {
    pub fn mean_opt_time(&self) -> Option<f64> {
        (self.steps > 0).then(|| self.optimization_time / self.steps as f64)
    }

    pub fn succeeded(&self) -> bool {
        self.outcome == Outcome::Success
    }
}

/// Labels attached to a trial for reporting.
#[derive(Debug, Clone, Default)]
pub struct TrialLabels {
    pub scenario: String,
    pub planner: String,
    pub state_index: usize,
}

/// Runs one closed-loop trial from `initial`.
pub fn run_trial(config: &ScenarioConfig, initial: State, seed: u64) -> Result<TrialResult> {
    run_labeled_trial(
        config,
        initial,
        seed,
        &TrialLabels {
            scenario: config.name.clone(),
            planner: config.planner.label().to_string(),
            state_index: 0,
        },
    )
}

pub fn run_labeled_trial(config: &ScenarioConfig, initial: State, seed: u64, labels: &TrialLabels) -> Result<TrialResult> {
    config.validate()?;
    let world = &config.world;
    let dt = config.mppi.dt;
    let max_steps = config.max_steps();
    let mut cost = config.cost;
    let mut guidance = Duration::ZERO;

    let mut tracker = match config.planner {
        PlannerKind::AstarMppi => {
            let params = config.astar.unwrap_or_default();
            let t0 = Instant::now();
            let (_, path) = plan_reference_path(world, initial.position(), &params)?;
            guidance += t0.elapsed();
            Some(SubgoalTracker::new(path, params.lookahead))
        }
        _ => None,
    };

    let mut planner = MppiPlanner::new(config.mppi, seed)?;
    let mut state = initial;
    let mut trajectory = Vec::with_capacity(max_steps + 1);
    let mut path_length = 0.0;
    let mut opt_time = Duration::ZERO;
    let mut steps = 0;
    let mut outcome = Outcome::Timeout;
    let mut success_time = None;

    loop {
        let t = steps as f64 * dt;
        if world.in_collision(state.position()) {
            outcome = Outcome::Collision;
        } else if state.position().distance(world.goal) <= world.goal_tolerance {
            outcome = Outcome::Success;
            success_time = Some(t);
        }
        if outcome != Outcome::Timeout || steps >= max_steps {
            trajectory.push(sample(t, state, Control::ZERO));
            break;
        }

        if let Some(tr) = tracker.as_mut() {
            let t0 = Instant::now();
            cost.goal = tr.update(&state);
            guidance += t0.elapsed();
        }
        let (u, diag) = planner.plan(state, world, &cost)?;
        opt_time += diag.optimization_time;
        trajectory.push(sample(t, state, u));
        let next = step(state, u, dt)?;
        path_length += state.position().distance(next.position());
        state = next;
        steps += 1;
    }

    Ok(TrialResult {
        scenario: labels.scenario.clone(),
        planner: labels.planner.clone(),
        kind: config.planner,
        horizon: config.mppi.horizon,
        state_index: labels.state_index,
        initial,
        seed,
        outcome,
        success_time,
        path_length,
        steps,
        optimization_time: opt_time.as_secs_f64(),
        guidance_time: guidance.as_secs_f64(),
        final_state: state,
        trajectory,
    })
}

fn sample(t: f64, s: State, u: Control) -> TrajectorySample {
    TrajectorySample {
        t,
        x: s.x,
        y: s.y,
        theta: s.theta,
        v: u.v,
        omega: u.omega,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteScenario {
    pub id: String,
    pub world: World,
    /// Local-minimum point handed to the RPA planner.
    pub minimum: Point,
    /// Restricts the scenario to these planner ids; all planners if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planners: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerVariant {
    pub id: String,
    pub kind: PlannerKind,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Repetitions per initial state; each seed is mixed with the state index.
    pub seeds: Vec<u64>,
    #[serde(default = "default_time_limit")]
    pub time_limit: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_w_obst")]
    pub w_obst: f64,
    #[serde(default)]
    pub mppi: MppiParams,
    #[serde(default)]
    pub astar: AStarParams,
    pub initial_states: Vec<State>,
    pub planners: Vec<PlannerVariant>,
    pub scenarios: Vec<SuiteScenario>,
}

fn default_time_limit() -> f64 {
    50.0
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_w_obst() -> f64 {
    DEFAULT_W_OBST
}

impl SuiteConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SuiteConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn reference(&self) -> Option<&PlannerVariant> {
        self.planners.iter().find(|p| p.kind == PlannerKind::AstarMppi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() || self.initial_states.is_empty() {
            return Err(Error::config("suite needs at least one seed and one initial state"));
        }
        if self.reference().is_none() {
            return Err(Error::config("suite must include an astar-mppi planner as the reference"));
        }
        for s in &self.scenarios {
            for id in s.planners.iter().flatten() {
                if !self.planners.iter().any(|p| &p.id == id) {
                    return Err(Error::config(format!("scenario '{}' names unknown planner '{id}'", s.id)));
                }
            }
            for p in self.planners_for(s) {
                self.scenario_config(s, p)?.validate()?;
            }
        }
        Ok(())
    }

    pub fn planners_for<'a>(&'a self, scenario: &'a SuiteScenario) -> impl Iterator<Item = &'a PlannerVariant> + 'a {
        self.planners
            .iter()
            .filter(move |p| scenario.planners.as_ref().map_or(true, |ids| ids.contains(&p.id)))
    }

    /// Full trial configuration for one scenario/planner pair.
    pub fn scenario_config(&self, scenario: &SuiteScenario, planner: &PlannerVariant) -> Result<ScenarioConfig> {
        let goal = scenario.world.goal;
        let cost = match planner.kind {
            PlannerKind::RpaMppi => CostParams::rpa(goal, scenario.minimum, self.alpha),
            _ => CostParams {
                minimum: Some(scenario.minimum),
                alpha: self.alpha,
                ..CostParams::baseline(goal)
            },
        }
        .with_w_obst(self.w_obst);
        Ok(ScenarioConfig {
            name: scenario.id.clone(),
            planner: planner.kind,
            time_limit: self.time_limit,
            seed: self.seeds[0],
            world: scenario.world.clone(),
            initial_states: self.initial_states.clone(),
            mppi: self.mppi.with_horizon(planner.horizon),
            cost,
            astar: (planner.kind == PlannerKind::AstarMppi).then_some(self.astar),
        })
    }

    /// Keeps only scenarios whose id contains `filter`.
    pub fn filtered(mut self, filter: &str) -> Self {
        self.scenarios.retain(|s| s.id.contains(filter));
        self
    }
}

/// Seed for one trial, derived from the suite seed and the initial-state
/// index so that every planner sees the same stream for the same start.
pub fn trial_seed(seed: u64, state_index: usize) -> u64 {
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(state_index as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const PAPER_HEADINGS: [f64; 4] = [
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    1.25 * std::f64::consts::PI,
    1.5 * std::f64::consts::PI,
];

pub const PAPER_POSITIONS: [(f64, f64); 6] = [(10.0, 1.0), (1.0, 1.0), (19.0, 1.0), (10.0, 8.5), (1.0, 8.5), (19.0, 8.5)];

/// The 24 initial states: six positions × four headings.
pub fn paper_initial_states() -> Vec<State> {
    PAPER_POSITIONS
        .iter()
        .flat_map(|&(x, y)| PAPER_HEADINGS.iter().map(move |&th| State::new(x, y, th).expect("finite")))
        .collect()
}

/// A 20 × 20 m world with one wall of the given width between the start
/// area and the goal. The inflated lower edge sits at y = 9.
pub fn wall_world(width: f64) -> World {
    World {
        bounds: Rect::new(Point::new(0.0, 0.0), Point::new(20.0, 20.0)),
        goal: Point::new(10.0, 18.0),
        goal_tolerance: 1.0,
        obstacles: vec![RectObstacle::new(Point::new(10.0, 10.0), width, 1.0, 0.5)],
    }
}

pub const WALL_MINIMUM: Point = Point::new(10.0, 9.0);

pub fn paper_planners() -> Vec<PlannerVariant> {
    let v = |id: &str, kind, horizon| PlannerVariant {
        id: id.into(),
        kind,
        horizon,
    };
    vec![
        v("astar-mppi-50", PlannerKind::AstarMppi, 50),
        v("std-mppi-50", PlannerKind::StdMppi, 50),
        v("std-mppi-150", PlannerKind::StdMppi, 150),
        v("rpa-mppi-50", PlannerKind::RpaMppi, 50),
    ]
}

/// Short/Middle/Long wall scenarios with all four planners.
pub fn paper_suite(seeds: Vec<u64>) -> SuiteConfig {
    let scenario = |id: &str, width| SuiteScenario {
        id: id.into(),
        world: wall_world(width),
        minimum: WALL_MINIMUM,
        planners: None,
    };
    SuiteConfig {
        seeds,
        time_limit: 50.0,
        alpha: DEFAULT_ALPHA,
        w_obst: DEFAULT_W_OBST,
        mppi: MppiParams::default(),
        astar: AStarParams::default(),
        initial_states: paper_initial_states(),
        planners: paper_planners(),
        scenarios: vec![
            scenario("short-wid", 4.0),
            scenario("middle-wid", 10.0),
            scenario("long-wid", 16.0),
        ],
    }
}

/// Long wall with the RPA local minimum shifted 2 m along x.
pub fn misspecified_scenario() -> SuiteScenario {
    SuiteScenario {
        id: "long-wid-misspecified".into(),
        world: wall_world(16.0),
        minimum: Point::new(WALL_MINIMUM.x + 2.0, WALL_MINIMUM.y),
        planners: Some(vec!["rpa-mppi-50".into()]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario: String,
    pub planner_id: String,
    pub planner: String,
    pub horizon: usize,
    pub trials: usize,
    pub successes: usize,
    /// Success rate, percent.
    pub sr: f64,
    /// Trials solved by both this planner and the reference; the RDST and
    /// RDPL denominators.
    pub common: usize,
    pub rdst: Option<f64>,
    pub rdpl: Option<f64>,
    /// Mean optimization time per step, seconds.
    pub ct: Option<f64>,
    /// Mean guidance time (reference path and subgoals) per step, seconds.
    pub guidance_ct: Option<f64>,
    pub total_ct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
    pub note: String,
}

impl MetricsTable {
    pub fn get(&self, scenario: &str, planner_id: &str) -> Option<&MetricsRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.planner_id == planner_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Record wall-clock timing. When off, CT columns are left empty so
    /// the outputs depend only on the seeds.
    pub timing: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { timing: true }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResults {
    pub table: MetricsTable,
    pub trials: Vec<TrialResult>,
}

struct Job<'a> {
    scenario: &'a SuiteScenario,
    variant: &'a PlannerVariant,
    config: ScenarioConfig,
    state_index: usize,
    seed: u64,
}

/// Runs every trial of the suite (in parallel) and aggregates the table.
pub fn run_suite(suite: &SuiteConfig, options: SuiteOptions) -> Result<SuiteResults> {
    suite.validate()?;
    let mut jobs = Vec::new();
    for scenario in &suite.scenarios {
        for variant in suite.planners_for(scenario) {
            let config = suite.scenario_config(scenario, variant)?;
            for (state_index, _) in suite.initial_states.iter().enumerate() {
                for &seed in &suite.seeds {
                    jobs.push(Job {
                        scenario,
                        variant,
                        config: config.clone(),
                        state_index,
                        seed: trial_seed(seed, state_index),
                    });
                }
            }
        }
    }
    log::info!("running {} trials", jobs.len());
    let trials = jobs
        .par_iter()
        .map(|job| {
            let labels = TrialLabels {
                scenario: job.scenario.id.clone(),
                planner: job.variant.id.clone(),
                state_index: job.state_index,
            };
            let r = run_labeled_trial(&job.config, suite.initial_states[job.state_index], job.seed, &labels)?;
            log::debug!(
                "{} {} state {} -> {:?} after {} steps",
                r.scenario,
                r.planner,
                r.state_index,
                r.outcome,
                r.steps
            );
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = suite.reference().expect("validated").id.clone();
    let table = aggregate(&trials, &suite_row_order(suite), &reference, options);
    Ok(SuiteResults { table, trials })
}

fn suite_row_order(suite: &SuiteConfig) -> Vec<(String, PlannerVariant)> {
    suite
        .scenarios
        .iter()
        .flat_map(|s| suite.planners_for(s).map(move |p| (s.id.clone(), p.clone())))
        .collect()
}

/// Builds the metrics table from raw trials. Rows follow `order`.
pub fn aggregate(
    trials: &[TrialResult],
    order: &[(String, PlannerVariant)],
    reference: &str,
    options: SuiteOptions,
) -> MetricsTable {
    type Key = (usize, u64);
    let mut refs: HashMap<&str, HashMap<Key, &TrialResult>> = HashMap::new();
    for t in trials.iter().filter(|t| t.planner == reference && t.succeeded()) {
        refs.entry(t.scenario.as_str())
            .or_default()
            .insert((t.state_index, t.seed), t);
    }

    let rows = order
        .iter()
        .map(|(scenario, variant)| {
            let mine: Vec<&TrialResult> = trials
                .iter()
                .filter(|t| &t.scenario == scenario && t.planner == variant.id)
                .collect();
            let successes = mine.iter().filter(|t| t.succeeded()).count();
            let sr = if mine.is_empty() {
                0.0
            } else {
                100.0 * successes as f64 / mine.len() as f64
            };

            let scenario_refs = refs.get(scenario.as_str());
            let mut dt = Vec::new();
            let mut dl = Vec::new();
            for t in mine.iter().filter(|t| t.succeeded()) {
                let Some(r) = scenario_refs.and_then(|m| m.get(&(t.state_index, t.seed))) else {
                    continue;
                };
                let (ts, tr) = (t.success_time.unwrap_or(0.0), r.success_time.unwrap_or(0.0));
                dt.push(relative_difference(ts, tr));
                dl.push(relative_difference(t.path_length, r.path_length));
            }
            log::info!("{scenario}/{}: RDST/RDPL over {} common successes", variant.id, dt.len());
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);

            let steps: usize = mine.iter().map(|t| t.steps).sum();
            let per_step = |f: fn(&TrialResult) -> f64| {
                (options.timing && steps > 0).then(|| mine.iter().map(|t| f(t)).sum::<f64>() / steps as f64)
            };
            let ct = per_step(|t| t.optimization_time);
            let guidance_ct = per_step(|t| t.guidance_time);
            let total_ct = ct.zip(guidance_ct).map(|(a, b)| a + b);

            MetricsRow {
                scenario: scenario.clone(),
                planner_id: variant.id.clone(),
                planner: variant.kind.label().to_string(),
                horizon: variant.horizon,
                trials: mine.len(),
                successes,
                sr,
                common: dt.len(),
                rdst: mean(&dt),
                rdpl: mean(&dl),
                ct,
                guidance_ct,
                total_ct,
            }
        })
        .collect();
    MetricsTable {
        rows,
        note: GEOMETRY_NOTE.to_string(),
    }
}

/// `(value − reference) / reference × 100`; zero when both are zero.
fn relative_difference(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (value - reference) / reference * 100.0
    }
}

/// One line of `metrics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scenario: String,
    pub planner: String,
    pub horizon: usize,
    #[serde(rename = "SR")]
    pub sr: f64,
    #[serde(rename = "RDST")]
    pub rdst: Option<f64>,
    #[serde(rename = "RDPL")]
    pub rdpl: Option<f64>,
    #[serde(rename = "CT")]
    pub ct: Option<f64>,
}

pub const METRICS_HEADER: &str = "scenario,planner,horizon,SR,RDST,RDPL,CT";

impl From<&MetricsRow> for CsvRow {
    fn from(r: &MetricsRow) -> Self {
        Self {
            scenario: r.scenario.clone(),
            planner: r.planner.clone(),
            horizon: r.horizon,
            sr: r.sr,
            rdst: r.rdst,
            rdpl: r.rdpl,
            ct: r.ct,
        }
    }
}

pub fn metrics_csv(table: &MetricsTable) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in &table.rows {
        w.serialize(CsvRow::from(row)).map_err(|e| Error::config(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::config(e.to_string()))?;
    let mut out = format!("{METRICS_HEADER}\n");
    out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    Ok(out)
}

pub fn load_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    r.deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

fn timing_csv(table: &MetricsTable) -> String {
    let mut out = String::from("scenario,planner,horizon,plan_CT,guidance_CT,total_CT\n");
    let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scenario,
            r.planner,
            r.horizon,
            f(r.ct),
            f(r.guidance_ct),
            f(r.total_ct)
        );
    }
    out
}

pub fn trajectory_text(trial: &TrialResult) -> String {
    let mut out = String::from("t,x,y,theta,v,omega\n");
    for s in &trial.trajectory {
        let _ = writeln!(out, "{},{},{},{},{},{}", s.t, s.x, s.y, s.theta, s.v, s.omega);
    }
    out
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Side-by-side panels, one per planner, each with the world and that
/// planner's executed trajectories.
pub fn scenario_svg(scenario: &str, world: &World, trials: &[&TrialResult]) -> String {
    let mut planners: Vec<&str> = Vec::new();
    for t in trials {
        if !planners.contains(&t.planner.as_str()) {
            planners.push(&t.planner);
        }
    }
    let b = world.bounds;
    let pad = 1.0;
    let pw = b.width() + 2.0 * pad;
    let ph = b.height() + 2.0 * pad + 1.5;
    let panels = planners.len().max(1);
    let scale = 25.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        pw * panels as f64 * scale,
        ph * scale,
        pw * panels as f64,
        ph
    );
    let _ = writeln!(svg, "<title>{scenario}: executed trajectories ({GEOMETRY_NOTE})</title>");
    for (i, planner) in planners.iter().enumerate() {
        // World y grows upward; flip it inside each panel.
        let ox = i as f64 * pw + pad - b.min.x;
        let oy = ph - pad + b.min.y;
        let _ = writeln!(svg, r#"<g class="panel" transform="translate({ox} {oy}) scale(1 -1)">"#);
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="0.05"/>"#,
            b.min.x,
            b.min.y,
            b.width(),
            b.height()
        );
        for o in &world.obstacles {
            let m = o.inflated();
            let f = o.footprint();
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#cccccc"/>"##,
                m.min.x,
                m.min.y,
                m.width(),
                m.height()
            );
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#555555"/>"##,
                f.min.x,
                f.min.y,
                f.width(),
                f.height()
            );
        }
        let _ = writeln!(
            svg,
            r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="#2ca02c" stroke-width="0.05"/>"##,
            world.goal.x, world.goal.y, world.goal_tolerance
        );
        let color = PALETTE[i % PALETTE.len()];
        for t in trials.iter().filter(|t| t.planner == *planner) {
            let mut pts = String::new();
            for s in &t.trajectory {
                let _ = write!(pts, "{:.3},{:.3} ", s.x, s.y);
            }
            let _ = writeln!(
                svg,
                r#"<polyline class="trajectory" data-outcome="{:?}" points="{}" fill="none" stroke="{color}" stroke-width="0.06" stroke-opacity="0.6"/>"#,
                t.outcome,
                pts.trim_end()
            );
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="1.0" font-size="0.8" text-anchor="middle">{planner}</text>"#,
            i as f64 * pw + 0.5 * pw
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `metrics.csv`, `timing.csv` (when timed), `summary.json`,
/// per-trial trajectory dumps and one SVG per scenario under `out_dir`.
pub fn export_results(table: &MetricsTable, trials: &[TrialResult], worlds: &[(String, World)], out_dir: &Path) -> Result<()> {
    write(out_dir.join("metrics.csv"), &metrics_csv(table)?)?;
    if table.rows.iter().any(|r| r.ct.is_some()) {
        write(out_dir.join("timing.csv"), &timing_csv(table))?;
    }
    let summary = serde_json::to_string_pretty(table).map_err(|e| Error::config(e.to_string()))?;
    write(out_dir.join("summary.json"), &summary)?;
    for t in trials {
        let name = format!("s{:02}_seed{}.csv", t.state_index, t.seed);
        write(
            out_dir.join("trajectories").join(&t.scenario).join(&t.planner).join(name),
            &trajectory_text(t),
        )?;
    }
    for (id, world) in worlds {
        let mine: Vec<&TrialResult> = trials.iter().filter(|t| &t.scenario == id).collect();
        write(out_dir.join("plots").join(format!("{id}.svg")), &scenario_svg(id, world, &mine))?;
    }
    Ok(())
}

pub fn suite_worlds(suite: &SuiteConfig) -> Vec<(String, World)> {
    suite.scenarios.iter().map(|s| (s.id.clone(), s.world.clone())).collect()
}
