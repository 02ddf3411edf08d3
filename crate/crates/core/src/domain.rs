//! Value types shared by every stage of the planner: poses, controls,
//! worlds, and the configuration records that describe a scenario.
//!
//! Everything here is plain immutable data once validated. Configuration
//! records deserialize from TOML (see `configs/` and the README for the
//! schema) and serialize back without loss.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into the half-open interval (-π, π].
pub fn normalize_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(wrap_angle(theta))
}

#[inline]
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// A planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn distance_squared(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Robot pose. The heading is always kept in (-π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Deserialize)]
struct RawState {
    x: f64,
    y: f64,
    theta: f64,
}

impl TryFrom<RawState> for State {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        State::new(raw.x, raw.y, raw.theta)
    }
}

impl State {
    pub fn new(x: f64, y: f64, theta: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("state position"));
        }
        Ok(Self {
            x,
            y,
            theta: normalize_angle(theta)?,
        })
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Unicycle input: linear velocity `v` (m/s) and turn rate `omega` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Control {
    pub v: f64,
    pub omega: f64,
}

impl Control {
    pub const ZERO: Control = Control { v: 0.0, omega: 0.0 };

    pub const fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }
}

impl std::ops::Add for Control {
    type Output = Control;

    fn add(self, rhs: Control) -> Control {
        Control::new(self.v + rhs.v, self.omega + rhs.omega)
    }
}

impl std::ops::Sub for Control {
    type Output = Control;

    fn sub(self, rhs: Control) -> Control {
        Control::new(self.v - rhs.v, self.omega - rhs.omega)
    }
}

/// The MPPI decision variable: one control per horizon step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControlSequence(pub Vec<Control>);

impl ControlSequence {
    pub fn zeros(horizon: usize) -> Self {
        Self(vec![Control::ZERO; horizon])
    }

    pub fn constant(control: Control, horizon: usize) -> Self {
        Self(vec![control; horizon])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Control] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Control> {
        self.0.iter()
    }
}

impl From<Vec<Control>> for ControlSequence {
    fn from(v: Vec<Control>) -> Self {
        Self(v)
    }
}

impl std::ops::Index<usize> for ControlSequence {
    type Output = Control;

    fn index(&self, i: usize) -> &Control {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlBounds {
    pub v_min: f64,
    pub v_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl Default for ControlBounds {
    fn default() -> Self {
        Self {
            v_min: 0.0,
            v_max: 1.0,
            omega_min: -0.5,
            omega_max: 0.5,
        }
    }
}

impl ControlBounds {
    pub fn validate(&self) -> Result<()> {
        let all = [self.v_min, self.v_max, self.omega_min, self.omega_max];
        if all.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("control bounds"));
        }
        if self.v_min > self.v_max || self.omega_min > self.omega_max {
            return Err(Error::config("control bounds have min > max"));
        }
        Ok(())
    }

    pub fn contains(&self, u: Control) -> bool {
        (self.v_min..=self.v_max).contains(&u.v) && (self.omega_min..=self.omega_max).contains(&u.omega)
    }
}

/// Axis-aligned rectangle given by its lower-left and upper-right corners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub const fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    /// Closed containment: points on the boundary are inside.
    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn inflate(&self, by: f64) -> Rect {
        Rect::new(
            Point::new(self.min.x - by, self.min.y - by),
            Point::new(self.max.x + by, self.max.y + by),
        )
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::NonFinite("rectangle"));
        }
        if self.min.x >= self.max.x || self.min.y >= self.max.y {
            return Err(Error::config(format!("{what} has non-positive extent")));
        }
        Ok(())
    }
}

/// Rectangular obstacle. Collision checks use the footprint grown by
/// `safety_margin` on every side (square corners, no rounding).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectObstacle {
    pub center: Point,
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub safety_margin: f64,
}

impl RectObstacle {
    pub fn new(center: Point, width: f64, height: f64, safety_margin: f64) -> Self {
        Self {
            center,
            width,
            height,
            safety_margin,
        }
    }

    pub fn footprint(&self) -> Rect {
        let hw = 0.5 * self.width;
        let hh = 0.5 * self.height;
        Rect::new(
            Point::new(self.center.x - hw, self.center.y - hh),
            Point::new(self.center.x + hw, self.center.y + hh),
        )
    }

    pub fn inflated(&self) -> Rect {
        self.footprint().inflate(self.safety_margin)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() || !self.width.is_finite() || !self.height.is_finite() || !self.safety_margin.is_finite()
        {
            return Err(Error::NonFinite("obstacle"));
        }
        if self.width <= 0.0 || self.height <= 0.0 {
            return Err(Error::config("obstacle width and height must be positive"));
        }
        if self.safety_margin < 0.0 {
            return Err(Error::config("obstacle safety margin must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub bounds: Rect,
    pub goal: Point,
    #[serde(default = "default_goal_tolerance")]
    pub goal_tolerance: f64,
    #[serde(default)]
    pub obstacles: Vec<RectObstacle>,
}

fn default_goal_tolerance() -> f64 {
    1.0
}

impl World {
    /// True if `p` lies inside (or on the boundary of) any inflated obstacle.
    #[inline]
    pub fn in_collision(&self, p: Point) -> bool {
        self.obstacles.iter().any(|o| o.inflated().contains(p))
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate("world bounds")?;
        for o in &self.obstacles {
            o.validate()?;
        }
        if !self.goal.is_finite() {
            return Err(Error::NonFinite("goal"));
        }
        if !(self.goal_tolerance > 0.0) {
            return Err(Error::config("goal tolerance must be positive"));
        }
        if self.in_collision(self.goal) {
            return Err(Error::config("goal lies inside an inflated obstacle"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    Baseline,
    Rpa,
}

/// Sign of the repulsive distance term in the potential. `Subtract` gives
/// `‖goal − p‖ − α‖minimum − p‖`, the convention under which the sign and
/// uniqueness properties hold; `Add` is kept for comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepulsionSign {
    #[default]
    Subtract,
    Add,
}

impl RepulsionSign {
    pub fn factor(self) -> f64 {
        match self {
            RepulsionSign::Subtract => -1.0,
            RepulsionSign::Add => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub mode: CostMode,
    pub goal: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimum: Option<Point>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_w_obst")]
    pub w_obst: f64,
    #[serde(default)]
    pub repulsion: RepulsionSign,
}

pub const DEFAULT_ALPHA: f64 = 0.75;
pub const DEFAULT_W_OBST: f64 = 1.0e6;

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_w_obst() -> f64 {
    DEFAULT_W_OBST
}

impl CostParams {
    pub fn baseline(goal: Point) -> Self {
        Self {
            mode: CostMode::Baseline,
            goal,
            minimum: None,
            alpha: DEFAULT_ALPHA,
            w_obst: DEFAULT_W_OBST,
            repulsion: RepulsionSign::Subtract,
        }
    }

    pub fn rpa(goal: Point, minimum: Point, alpha: f64) -> Self {
        Self {
            mode: CostMode::Rpa,
            goal,
            minimum: Some(minimum),
            alpha,
            w_obst: DEFAULT_W_OBST,
            repulsion: RepulsionSign::Subtract,
        }
    }

    pub fn with_w_obst(mut self, w_obst: f64) -> Self {
        self.w_obst = w_obst;
        self
    }

    pub fn with_repulsion(mut self, sign: RepulsionSign) -> Self {
        self.repulsion = sign;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.goal.is_finite() || !self.alpha.is_finite() || !self.w_obst.is_finite() {
            return Err(Error::NonFinite("cost parameters"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.w_obst > 0.0) {
            return Err(Error::config("w_obst must be positive"));
        }
        match (self.mode, self.minimum) {
            (CostMode::Rpa, None) => Err(Error::config("rpa cost requires a local-minimum point")),
            (CostMode::Rpa, Some(m)) if !m.is_finite() => Err(Error::NonFinite("local-minimum point")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MppiParams {
    /// Number of sampled rollouts per planning step.
    pub samples: usize,
    pub horizon: usize,
    /// Softmax temperature.
    pub lambda: f64,
    /// Diagonal of the sampling covariance, (v, omega).
    pub noise_variance: [f64; 2],
    #[serde(default)]
    pub bounds: ControlBounds,
    pub dt: f64,
}

impl Default for MppiParams {
    fn default() -> Self {
        Self {
            samples: 1000,
            horizon: 50,
            lambda: 0.10,
            noise_variance: [1.0, 1.0],
            bounds: ControlBounds::default(),
            dt: 0.1,
        }
    }
}

impl MppiParams {
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.horizon == 0 {
            return Err(Error::config("samples and horizon must be at least 1"));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::config("lambda must be positive"));
        }
        if self.noise_variance.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::config("noise variances must be positive"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("dt must be positive"));
        }
        self.bounds.validate()
    }
}

/// Grid search settings for the A*-guided baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AStarParams {
    pub grid_resolution: f64,
    pub lookahead: f64,
}

impl Default for AStarParams {
    fn default() -> Self {
        Self {
            grid_resolution: 0.5,
            lookahead: 2.0,
        }
    }
}

impl AStarParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_resolution > 0.0) || !(self.lookahead > 0.0) {
            return Err(Error::config("A* resolution and lookahead must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    StdMppi,
    AstarMppi,
    RpaMppi,
}

impl PlannerKind {
    pub fn label(self) -> &'static str {
        match self {
            PlannerKind::StdMppi => "Std-MPPI",
            PlannerKind::AstarMppi => "A*-MPPI",
            PlannerKind::RpaMppi => "RPA-MPPI",
        }
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "std" | "std-mppi" | "mppi" => Ok(PlannerKind::StdMppi),
            "astar" | "a*" | "astar-mppi" | "a*-mppi" => Ok(PlannerKind::AstarMppi),
            "rpa" | "rpa-mppi" => Ok(PlannerKind::RpaMppi),
            other => Err(Error::config(format!("unknown planner '{other}' (expected std, astar or rpa)"))),
        }
    }
}

/// Everything needed to run closed-loop trials for one planner in one world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub planner: PlannerKind,
    /// Seconds of simulated time before a trial counts as a timeout.
    #[serde(default = "default_time_limit")]
    pub time_limit: f64,
    #[serde(default)]
    pub seed: u64,
    pub world: World,
    pub initial_states: Vec<State>,
    #[serde(default)]
    pub mppi: MppiParams,
    pub cost: CostParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub astar: Option<AStarParams>,
}

fn default_time_limit() -> f64 {
    50.0
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        self.mppi.validate()?;
        self.cost.validate()?;
        if let Some(a) = &self.astar {
            a.validate()?;
        }
        if !(self.time_limit > 0.0) || !self.time_limit.is_finite() {
            return Err(Error::config("time limit must be positive"));
        }
        match (self.planner, self.cost.mode) {
            (PlannerKind::RpaMppi, CostMode::Rpa) => {}
            (PlannerKind::RpaMppi, _) => return Err(Error::config("rpa-mppi requires cost.mode = \"rpa\"")),
            (_, CostMode::Rpa) => return Err(Error::config("only rpa-mppi uses the rpa cost")),
            _ => {}
        }
        Ok(())
    }

    /// Number of closed-loop steps allowed by the time limit.
    pub fn max_steps(&self) -> usize {
        (self.time_limit / self.mppi.dt).round() as usize
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(s).map_err(|e| Error::Parse {
            path: "<string>".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ScenarioConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}
