//! Numerical certification of the RPA potential.
//!
//! The analysis scene puts the local minimum at the origin, the goal at
//! `(0, y_goal)` and a `W × H` obstacle between them with its lower edge on
//! the x axis. Within it we check, by dense sampling:
//!
//! 1. `∂g/∂x(x, 0) < 0` for `0 < x ≤ W/2`
//! 2. `∂g/∂x(x, 0) > 0` for `−W/2 ≤ x < 0`
//! 3. `∂g/∂y(x, y) < 0` for `0 ≤ y ≤ H`
//! 4. the goal is the only local minimum of the constant-control
//!    cost-to-go, found by exhaustive lattice search
//!
//! plus agreement of the closed-form gradient with central differences.
//! Lattice results only certify the sampled nodes, not the continuum; the
//! reports say so.

use std::collections::VecDeque;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costs::{cost_to_go_const, grad_g, potential_g};
use crate::domain::{CostMode, CostParams, Point, Rect, RectObstacle, RepulsionSign, World};
use crate::error::{Error, Result};

pub const LATTICE_NOTE: &str = "minima are certified on the sampled lattice only";

/// Points closer than this to the goal or the local minimum are skipped by
/// gradient checks.
pub const SINGULAR_EXCLUSION: f64 = 1e-3;

/// Central-difference gradient.
pub fn finite_diff_grad(f: impl Fn(Point) -> f64, p: Point, h: f64) -> (f64, f64) {
    let fx = (f(Point::new(p.x + h, p.y)) - f(Point::new(p.x - h, p.y))) / (2.0 * h);
    let fy = (f(Point::new(p.x, p.y + h)) - f(Point::new(p.x, p.y - h))) / (2.0 * h);
    (fx, fy)
}

/// Square lattice aligned to integer multiples of the resolution.
#[derive(Debug, Clone, Copy)]
struct Lattice {
    ix0: i64,
    iy0: i64,
    nx: usize,
    ny: usize,
    resolution: f64,
}

impl Lattice {
    fn covering(region: Rect, resolution: f64) -> Self {
        let ix0 = (region.min.x / resolution - 1e-9).ceil() as i64;
        let iy0 = (region.min.y / resolution - 1e-9).ceil() as i64;
        let ix1 = (region.max.x / resolution + 1e-9).floor() as i64;
        let iy1 = (region.max.y / resolution + 1e-9).floor() as i64;
        Self {
            ix0,
            iy0,
            nx: (ix1 - ix0 + 1).max(0) as usize,
            ny: (iy1 - iy0 + 1).max(0) as usize,
            resolution,
        }
    }

    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn point(&self, i: usize) -> Point {
        let (ix, iy) = (i % self.nx, i / self.nx);
        Point::new(
            (self.ix0 + ix as i64) as f64 * self.resolution,
            (self.iy0 + iy as i64) as f64 * self.resolution,
        )
    }

    fn nearest(&self, p: Point) -> usize {
        let ix = ((p.x / self.resolution).round() as i64 - self.ix0).clamp(0, self.nx as i64 - 1) as usize;
        let iy = ((p.y / self.resolution).round() as i64 - self.iy0).clamp(0, self.ny as i64 - 1) as usize;
        iy * self.nx + ix
    }

    fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (ix, iy) = ((i % self.nx) as i64, (i / self.nx) as i64);
        (-1i64..=1)
            .flat_map(move |dy| (-1i64..=1).map(move |dx| (dx, dy)))
            .filter(|&d| d != (0, 0))
            .filter_map(move |(dx, dy)| {
                let (x, y) = (ix + dx, iy + dy);
                (x >= 0 && y >= 0 && (x as usize) < self.nx && (y as usize) < self.ny)
                    .then(|| y as usize * self.nx + x as usize)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimumEntry {
    pub point: Point,
    pub cost: f64,
    pub is_global: bool,
    /// Number of equal-cost nodes collapsed into this minimum.
    pub plateau_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaReport {
    pub cost_mode: String,
    pub grid_resolution: f64,
    pub region: Rect,
    pub nodes: usize,
    pub minima: Vec<MinimumEntry>,
    pub note: String,
}

impl MinimaReport {
    /// The minimum sitting exactly on the lattice node nearest `p`.
    pub fn minimum_at(&self, p: Point) -> Option<&MinimumEntry> {
        let snap = |v: f64| (v / self.grid_resolution).round() * self.grid_resolution;
        let target = Point::new(snap(p.x), snap(p.y));
        self.minima
            .iter()
            .find(|m| m.point.distance(target) < 0.5 * self.grid_resolution)
    }
}

fn evaluate_lattice(cost_fn: &(impl Fn(Point) -> f64 + Sync), lattice: &Lattice) -> Vec<f64> {
    (0..lattice.len()).into_par_iter().map(|i| cost_fn(lattice.point(i))).collect()
}

/// Exhaustive search for local minima of `cost_fn` over an 8-connected
/// lattice. A node with a strictly lower neighbor is never a minimum;
/// equal-cost components are flood-filled and count as one minimum only
/// if no node on them has a lower neighbor.
pub fn grid_local_minima(
    cost_fn: impl Fn(Point) -> f64 + Sync,
    region: Rect,
    resolution: f64,
    cost_mode: &str,
) -> Result<MinimaReport> {
    if !(resolution > 0.0) {
        return Err(Error::config("grid resolution must be positive"));
    }
    let lattice = Lattice::covering(region, resolution);
    let costs = evaluate_lattice(&cost_fn, &lattice);
    let global = costs.iter().copied().fold(f64::INFINITY, f64::min);

    let mut visited = vec![false; costs.len()];
    let mut minima = Vec::new();
    for i in 0..costs.len() {
        if visited[i] {
            continue;
        }
        let c = costs[i];
        let mut lower = false;
        let mut equal = false;
        for n in lattice.neighbors(i) {
            lower |= costs[n] < c;
            equal |= costs[n] == c;
        }
        if lower {
            continue;
        }
        if !equal {
            visited[i] = true;
            minima.push(MinimumEntry {
                point: lattice.point(i),
                cost: c,
                is_global: c == global,
                plateau_size: 1,
            });
            continue;
        }
        // Plateau: collect the equal-cost component.
        let mut queue = VecDeque::from([i]);
        visited[i] = true;
        let mut size = 0;
        let mut escapes = false;
        while let Some(j) = queue.pop_front() {
            size += 1;
            for n in lattice.neighbors(j) {
                if costs[n] < c {
                    escapes = true;
                } else if costs[n] == c && !visited[n] {
                    visited[n] = true;
                    queue.push_back(n);
                }
            }
        }
        if !escapes {
            minima.push(MinimumEntry {
                point: lattice.point(i),
                cost: c,
                is_global: c == global,
                plateau_size: size,
            });
        }
    }

    Ok(MinimaReport {
        cost_mode: cost_mode.to_string(),
        grid_resolution: resolution,
        region,
        nodes: costs.len(),
        minima,
        note: LATTICE_NOTE.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentReport {
    pub grid_resolution: f64,
    pub free_nodes: usize,
    /// Free nodes whose greedy descent ends at the target node.
    pub reaching_target: usize,
    pub counterexamples: Vec<Point>,
}

impl DescentReport {
    pub fn passed(&self) -> bool {
        self.free_nodes == self.reaching_target
    }
}

/// Follows steepest strictly-decreasing 8-neighbor moves from every node
/// accepted by `is_free` and counts how many end at the node nearest
/// `target`.
pub fn greedy_descent(
    cost_fn: impl Fn(Point) -> f64 + Sync,
    is_free: impl Fn(Point) -> bool,
    region: Rect,
    resolution: f64,
    target: Point,
) -> DescentReport {
    let lattice = Lattice::covering(region, resolution);
    let costs = evaluate_lattice(&cost_fn, &lattice);
    let next: Vec<usize> = (0..costs.len())
        .map(|i| {
            lattice.neighbors(i).fold(i, |best, n| if costs[n] < costs[best] { n } else { best })
        })
        .collect();
    const UNRESOLVED: usize = usize::MAX;
    let mut sink = vec![UNRESOLVED; costs.len()];
    let mut stack = Vec::new();
    for start in 0..costs.len() {
        let mut at = start;
        while sink[at] == UNRESOLVED && next[at] != at {
            stack.push(at);
            at = next[at];
        }
        let s = if sink[at] == UNRESOLVED { at } else { sink[at] };
        sink[at] = s;
        for j in stack.drain(..) {
            sink[j] = s;
        }
    }
    let goal = lattice.nearest(target);
    let mut report = DescentReport {
        grid_resolution: resolution,
        free_nodes: 0,
        reaching_target: 0,
        counterexamples: Vec::new(),
    };
    for i in 0..costs.len() {
        let p = lattice.point(i);
        if !is_free(p) {
            continue;
        }
        report.free_nodes += 1;
        if sink[i] == goal {
            report.reaching_target += 1;
        } else if report.counterexamples.len() < 10 {
            report.counterexamples.push(p);
        }
    }
    report
}

/// Nearest lattice node to `p` for which `is_free` holds.
pub fn nearest_free_node(region: Rect, resolution: f64, p: Point, is_free: impl Fn(Point) -> bool) -> Option<Point> {
    let lattice = Lattice::covering(region, resolution);
    (0..lattice.len())
        .map(|i| lattice.point(i))
        .filter(|q| is_free(*q))
        .min_by(|a, b| a.distance_squared(p).total_cmp(&b.distance_squared(p)))
}

/// The canonical analysis configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisScene {
    pub y_goal: f64,
    /// Obstacle width `W`.
    pub width: f64,
    /// Obstacle height `H`.
    pub height: f64,
    pub alpha: f64,
    #[serde(default = "default_w_obst")]
    pub w_obst: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// World bounds; the lattice search covers them grown by `region_padding`.
    #[serde(default = "default_bounds")]
    pub bounds: Rect,
    #[serde(default = "default_padding")]
    pub region_padding: f64,
    #[serde(default = "default_resolutions")]
    pub resolutions: Vec<f64>,
    /// Spacing of the sign-property sampling.
    #[serde(default = "default_sample_step")]
    pub sample_step: f64,
    #[serde(default = "default_gradient_samples")]
    pub gradient_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_w_obst() -> f64 {
    crate::domain::DEFAULT_W_OBST
}
fn default_horizon() -> usize {
    50
}
fn default_bounds() -> Rect {
    Rect::new(Point::new(-10.0, -8.0), Point::new(10.0, 14.0))
}
fn default_padding() -> f64 {
    2.0
}
fn default_resolutions() -> Vec<f64> {
    vec![0.1, 0.05]
}
fn default_sample_step() -> f64 {
    0.01
}
fn default_gradient_samples() -> usize {
    10_000
}

impl Default for AnalysisScene {
    fn default() -> Self {
        Self {
            y_goal: 10.0,
            width: 8.0,
            height: 4.0,
            alpha: 0.75,
            w_obst: default_w_obst(),
            horizon: default_horizon(),
            bounds: default_bounds(),
            region_padding: default_padding(),
            resolutions: default_resolutions(),
            sample_step: default_sample_step(),
            gradient_samples: default_gradient_samples(),
            seed: 0,
        }
    }
}

impl AnalysisScene {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let scene: AnalysisScene = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.height > 0.0 && self.width > 0.0) {
            return Err(Error::config("obstacle width and height must be positive"));
        }
        if !(self.y_goal > self.height) {
            return Err(Error::config("the goal must lie above the obstacle (y_goal > H)"));
        }
        if self.resolutions.is_empty() || self.resolutions.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::config("lattice resolutions must be positive"));
        }
        if !(self.sample_step > 0.0) {
            return Err(Error::config("sample step must be positive"));
        }
        self.rpa_params(RepulsionSign::Subtract).validate()
    }

    pub fn goal(&self) -> Point {
        Point::new(0.0, self.y_goal)
    }

    pub fn world(&self) -> World {
        World {
            bounds: self.bounds,
            goal: self.goal(),
            goal_tolerance: 1.0,
            obstacles: vec![RectObstacle::new(
                Point::new(0.0, 0.5 * self.height),
                self.width,
                self.height,
                0.0,
            )],
        }
    }

    pub fn region(&self) -> Rect {
        self.bounds.inflate(self.region_padding)
    }

    pub fn rpa_params(&self, sign: RepulsionSign) -> CostParams {
        CostParams::rpa(self.goal(), Point::new(0.0, 0.0), self.alpha)
            .with_w_obst(self.w_obst)
            .with_repulsion(sign)
    }

    pub fn baseline_params(&self) -> CostParams {
        CostParams::baseline(self.goal()).with_w_obst(self.w_obst)
    }

    /// Largest half-width for which the x-sign properties hold at `y = 0`:
    /// `y_goal · sqrt(α² / (1 − α²))`.
    pub fn half_width_bound(&self) -> f64 {
        half_width_bound(self.y_goal, self.alpha)
    }

    pub fn minima(&self, params: &CostParams, resolution: f64) -> Result<MinimaReport> {
        let world = self.world();
        let label = match (params.mode, params.repulsion) {
            (CostMode::Baseline, _) => "baseline",
            (CostMode::Rpa, RepulsionSign::Subtract) => "rpa-subtract",
            (CostMode::Rpa, RepulsionSign::Add) => "rpa-add",
        };
        grid_local_minima(
            |p| cost_to_go_const(p, self.horizon, &world, params),
            self.region(),
            resolution,
            label,
        )
    }
}

pub fn half_width_bound(y_goal: f64, alpha: f64) -> f64 {
    y_goal * (alpha * alpha / (1.0 - alpha * alpha)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub violations: usize,
    pub counterexamples: Vec<Point>,
    pub detail: String,
}

impl PropertyCheck {
    fn from_samples(name: &str, detail: String, points: impl Iterator<Item = (Point, bool)>) -> Self {
        let mut samples = 0;
        let mut violations = 0;
        let mut counterexamples = Vec::new();
        for (p, ok) in points {
            samples += 1;
            if !ok {
                violations += 1;
                if counterexamples.len() < 10 {
                    counterexamples.push(p);
                }
            }
        }
        Self {
            name: name.to_string(),
            passed: samples > 0 && violations == 0,
            samples,
            violations,
            counterexamples,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck {
    pub samples: usize,
    pub max_relative_error: f64,
    pub tolerance: f64,
    pub step: f64,
    pub passed: bool,
}

/// Compares [`grad_g`] against central differences at random points of the
/// search region, skipping a small disc around each singular point.
pub fn gradient_oracle(params: &CostParams, region: Rect, samples: usize, seed: u64) -> GradientCheck {
    const H: f64 = 1e-6;
    const TOL: f64 = 1e-5;
    let minimum = params.minimum.expect("rpa parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < samples {
        let p = Point::new(
            rng.gen_range(region.min.x..region.max.x),
            rng.gen_range(region.min.y..region.max.y),
        );
        if p.distance(params.goal) <= SINGULAR_EXCLUSION || p.distance(minimum) <= SINGULAR_EXCLUSION {
            continue;
        }
        n += 1;
        let (ax, ay) = grad_g(p, params).expect("point is away from the singular set");
        let (fx, fy) = finite_diff_grad(|q| potential_g(q, params), p, H);
        let scale = ax.hypot(ay).max(1.0);
        worst = worst.max((ax - fx).abs() / scale).max((ay - fy).abs() / scale);
    }
    GradientCheck {
        samples,
        max_relative_error: worst,
        tolerance: TOL,
        step: H,
        passed: worst <= TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub repulsion: RepulsionSign,
    pub alpha: f64,
    pub y_goal: f64,
    pub width: f64,
    pub height: f64,
    pub half_width_bound: f64,
    pub feasibility: PropertyCheck,
    pub properties: Vec<PropertyCheck>,
    pub gradient: GradientCheck,
    pub minima: Vec<MinimaReport>,
    pub descent: Vec<DescentReport>,
    pub note: String,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.feasibility.passed && self.gradient.passed && self.properties.iter().all(|p| p.passed)
    }

    pub fn failed(&self) -> Vec<&PropertyCheck> {
        std::iter::once(&self.feasibility)
            .chain(&self.properties)
            .filter(|p| !p.passed)
            .collect()
    }
}

fn steps(from: f64, to: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(move |k| from + k as f64 * step)
}

/// Checks the four properties of the RPA potential on `scene` for one sign
/// convention. Failures are recorded in the report, never raised.
pub fn verify_properties(scene: &AnalysisScene, sign: RepulsionSign) -> Result<PropertyReport> {
    scene.validate()?;
    let params = scene.rpa_params(sign);
    let half = 0.5 * scene.width;
    let h = scene.sample_step;
    let gx = |p: Point| grad_g(p, &params).map(|g| g.0);
    let gy = |p: Point| grad_g(p, &params).map(|g| g.1);

    let bound = scene.half_width_bound();
    let feasibility = PropertyCheck {
        name: "half-width bound".into(),
        passed: half < bound,
        samples: 1,
        violations: usize::from(half >= bound),
        counterexamples: vec![],
        detail: format!("W/2 = {half} must be below y_goal*sqrt(a^2/(1-a^2)) = {bound:.6}"),
    };

    let p1 = PropertyCheck::from_samples(
        "property 1",
        format!("dg/dx(x, 0) < 0 for 0 < x <= {half}"),
        steps(h, half, h).map(|x| {
            let p = Point::new(x, 0.0);
            (p, gx(p).is_ok_and(|d| d < 0.0))
        }),
    );
    let p2 = PropertyCheck::from_samples(
        "property 2",
        format!("dg/dx(x, 0) > 0 for -{half} <= x < 0"),
        steps(h, half, h).map(|x| {
            let p = Point::new(-x, 0.0);
            (p, gx(p).is_ok_and(|d| d > 0.0))
        }),
    );
    let band = half + 1.0;
    let goal = scene.goal();
    let origin = Point::new(0.0, 0.0);
    let p3 = PropertyCheck::from_samples(
        "property 3",
        format!("dg/dy(x, y) < 0 for 0 <= y <= {}, |x| <= {band}", scene.height),
        steps(-band, band, h)
            .flat_map(|x| steps(0.0, scene.height, h).map(move |y| Point::new(x, y)))
            .filter(|p| p.distance(origin) > SINGULAR_EXCLUSION && p.distance(goal) > SINGULAR_EXCLUSION)
            .map(|p| (p, gy(p).is_ok_and(|d| d < 0.0))),
    );

    let mut minima = Vec::new();
    let mut descent = Vec::new();
    let world = scene.world();
    let mut p4_ok = true;
    let mut p4_detail = Vec::new();
    let mut p4_counter = Vec::new();
    for &res in &scene.resolutions {
        let report = scene.minima(&params, res)?;
        let unique_at_goal = report.minima.len() == 1 && report.minimum_at(goal).is_some_and(|m| m.is_global);
        p4_ok &= unique_at_goal;
        p4_detail.push(format!("{} minima at {res} m", report.minima.len()));
        p4_counter.extend(report.minima.iter().filter(|m| !m.is_global).map(|m| m.point).take(10));
        let d = greedy_descent(
            |p| cost_to_go_const(p, scene.horizon, &world, &params),
            |p| !world.in_collision(p),
            scene.region(),
            res,
            goal,
        );
        p4_ok &= d.passed();
        minima.push(report);
        descent.push(d);
    }
    let samples = minima.iter().map(|m| m.nodes).sum();
    let p4 = PropertyCheck {
        name: "property 4".into(),
        passed: p4_ok,
        samples,
        violations: p4_counter.len(),
        counterexamples: p4_counter,
        detail: format!(
            "goal is the unique lattice minimum and greedy descent reaches it ({}); {LATTICE_NOTE}",
            p4_detail.join(", ")
        ),
    };

    let gradient = gradient_oracle(&params, scene.region(), scene.gradient_samples, scene.seed);

    Ok(PropertyReport {
        repulsion: sign,
        alpha: scene.alpha,
        y_goal: scene.y_goal,
        width: scene.width,
        height: scene.height,
        half_width_bound: bound,
        feasibility,
        properties: vec![p1, p2, p3, p4],
        gradient,
        minima,
        descent,
        note: LATTICE_NOTE.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntrapment {
    pub minima: Vec<MinimaReport>,
    /// Nearest collision-free lattice node to the origin, per resolution.
    pub trap_nodes: Vec<Point>,
    pub goal_is_minimum: bool,
    pub trap_is_minimum: bool,
}

impl BaselineEntrapment {
    pub fn passed(&self) -> bool {
        self.goal_is_minimum && self.trap_is_minimum && self.minima.iter().all(|m| m.minima.len() >= 2)
    }
}

/// Lattice search with the squared-distance cost, which is expected to trap
/// the robot just below the obstacle.
pub fn baseline_entrapment(scene: &AnalysisScene) -> Result<BaselineEntrapment> {
    let params = scene.baseline_params();
    let world = scene.world();
    let mut out = BaselineEntrapment {
        minima: vec![],
        trap_nodes: vec![],
        goal_is_minimum: true,
        trap_is_minimum: true,
    };
    for &res in &scene.resolutions {
        let report = scene.minima(&params, res)?;
        let trap = nearest_free_node(scene.region(), res, Point::new(0.0, 0.0), |p| !world.in_collision(p))
            .ok_or_else(|| Error::config("analysis region has no free node"))?;
        out.goal_is_minimum &= report.minimum_at(scene.goal()).is_some_and(|m| m.is_global);
        out.trap_is_minimum &= report.minimum_at(trap).is_some_and(|m| !m.is_global);
        out.trap_nodes.push(trap);
        out.minima.push(report);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweep {
    pub alphas: Vec<f64>,
    pub bounds: Vec<f64>,
    pub increasing: bool,
}

/// The half-width bound over `alpha ∈ [0.01, 0.99]`; it must increase
/// monotonically and blow up as `alpha → 1`.
pub fn alpha_sweep(y_goal: f64) -> AlphaSweep {
    let alphas: Vec<f64> = (1..=99).map(|k| k as f64 / 100.0).collect();
    let bounds: Vec<f64> = alphas.iter().map(|&a| half_width_bound(y_goal, a)).collect();
    let increasing = bounds.windows(2).all(|w| w[1] > w[0]);
    AlphaSweep {
        alphas,
        bounds,
        increasing,
    }
}

/// Everything `verify` reports: both sign conventions, the adopted one, and
/// the baseline comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub scene: AnalysisScene,
    pub adopted: RepulsionSign,
    pub sign_resolution: String,
    pub conventions: Vec<PropertyReport>,
    pub baseline: BaselineEntrapment,
    pub alpha_sweep: AlphaSweep,
}

impl CertificationReport {
    pub fn adopted_report(&self) -> &PropertyReport {
        self.conventions
            .iter()
            .find(|r| r.repulsion == self.adopted)
            .expect("adopted convention is always evaluated")
    }

    pub fn passed(&self) -> bool {
        self.adopted_report().all_passed() && self.baseline.passed()
    }
}

pub fn certify(scene: &AnalysisScene) -> Result<CertificationReport> {
    let subtract = verify_properties(scene, RepulsionSign::Subtract)?;
    let add = verify_properties(scene, RepulsionSign::Add)?;
    let sign_resolution = format!(
        "repulsive term evaluated with both signs: subtract {}, add {}; adopted g = |goal - p| - alpha |minimum - p|, \
         the only form whose partial derivatives are x/d_goal - alpha x/d_min and -(y_goal - y)/d_goal - alpha y/d_min",
        if subtract.all_passed() { "passes" } else { "fails" },
        if add.all_passed() { "passes" } else { "fails" },
    );
    Ok(CertificationReport {
        scene: scene.clone(),
        adopted: RepulsionSign::Subtract,
        sign_resolution,
        conventions: vec![subtract, add],
        baseline: baseline_entrapment(scene)?,
        alpha_sweep: alpha_sweep(scene.y_goal),
    })
}
