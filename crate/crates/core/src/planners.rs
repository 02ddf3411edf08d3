//! Occupancy grid, 8-connected A*, and look-ahead subgoals for the
//! A*-guided MPPI baseline.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

pub use crate::domain::AStarParams;
use crate::domain::{CostParams, Point, State, World};
use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Boolean occupancy over the world bounds. A cell is blocked iff its
/// center lies inside an inflated obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    pub origin: Point,
    pub resolution: f64,
    pub rows: usize,
    pub cols: usize,
    blocked: Vec<bool>,
}

impl GridMap {
    pub fn from_fn(origin: Point, resolution: f64, rows: usize, cols: usize, mut f: impl FnMut(Cell) -> bool) -> Self {
        let mut blocked = Vec::with_capacity(rows * cols);
        for row in 0..rows {
            for col in 0..cols {
                blocked.push(f(Cell::new(row, col)));
            }
        }
        Self {
            origin,
            resolution,
            rows,
            cols,
            blocked,
        }
    }

    #[inline]
    pub fn index(&self, c: Cell) -> usize {
        c.row * self.cols + c.col
    }

    pub fn is_blocked(&self, c: Cell) -> bool {
        self.blocked[self.index(c)]
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|b| **b).count()
    }

    pub fn center(&self, c: Cell) -> Point {
        Point::new(
            self.origin.x + (c.col as f64 + 0.5) * self.resolution,
            self.origin.y + (c.row as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell containing `p`, if it lies on the grid.
    pub fn cell_of(&self, p: Point) -> Option<Cell> {
        let cx = ((p.x - self.origin.x) / self.resolution).floor();
        let cy = ((p.y - self.origin.y) / self.resolution).floor();
        if cx < 0.0 || cy < 0.0 || cx >= self.cols as f64 || cy >= self.rows as f64 {
            return None;
        }
        Some(Cell::new(cy as usize, cx as usize))
    }

    fn neighbor(&self, c: Cell, dr: isize, dc: isize) -> Option<Cell> {
        let r = c.row.checked_add_signed(dr)?;
        let col = c.col.checked_add_signed(dc)?;
        (r < self.rows && col < self.cols).then_some(Cell::new(r, col))
    }

    /// Free 8-neighbors with their step cost. Diagonal moves require both
    /// adjacent orthogonal cells to be free.
    pub fn successors(&self, c: Cell) -> impl Iterator<Item = (Cell, f64)> + '_ {
        const MOVES: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];
        MOVES.iter().filter_map(move |&(dr, dc)| {
            let n = self.neighbor(c, dr, dc)?;
            if self.is_blocked(n) {
                return None;
            }
            if dr != 0 && dc != 0 {
                let a = self.neighbor(c, dr, 0)?;
                let b = self.neighbor(c, 0, dc)?;
                if self.is_blocked(a) || self.is_blocked(b) {
                    return None;
                }
                Some((n, SQRT_2))
            } else {
                Some((n, 1.0))
            }
        })
    }
}

/// Rasterizes the inflated obstacles of `world` over its bounds.
pub fn rasterize(world: &World, resolution: f64) -> Result<GridMap> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::config("grid resolution must be positive"));
    }
    let cols = (world.bounds.width() / resolution).ceil() as usize;
    let rows = (world.bounds.height() / resolution).ceil() as usize;
    let origin = world.bounds.min;
    let mut grid = GridMap {
        origin,
        resolution,
        rows,
        cols,
        blocked: Vec::new(),
    };
    let blocked = (0..rows * cols)
        .map(|i| world.in_collision(grid.center(Cell::new(i / cols, i % cols))))
        .collect();
    grid.blocked = blocked;
    match grid.cell_of(world.goal) {
        None => Err(Error::InfeasibleGrid("goal lies outside the grid".into())),
        Some(c) if grid.is_blocked(c) => Err(Error::InfeasibleGrid("goal cell is blocked".into())),
        Some(_) => Ok(grid),
    }
}

/// Octile distance in cells.
pub fn octile(a: Cell, b: Cell) -> f64 {
    let dx = a.col.abs_diff(b.col) as f64;
    let dy = a.row.abs_diff(b.row) as f64;
    dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy)
}

/// Grid path from start to goal, as cell centers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferencePath {
    pub cells: Vec<Cell>,
    pub waypoints: Vec<Point>,
    /// Path cost in cell units (1 per straight move, √2 per diagonal).
    pub cost: f64,
}

impl ReferencePath {
    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

#[derive(PartialEq)]
struct OpenEntry {
    f: f64,
    h: f64,
    index: usize,
}

impl Eq for OpenEntry {}

impl Ord for OpenEntry {
    // Reversed so the max-heap pops the smallest (f, h, index).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// 8-connected A* with the octile heuristic. Ties on `f` go to the lower
/// `h`, then to the lower row-major index.
pub fn astar(grid: &GridMap, start: Cell, goal: Cell) -> Result<ReferencePath> {
    for (what, c) in [("start", start), ("goal", goal)] {
        if c.row >= grid.rows || c.col >= grid.cols {
            return Err(Error::InfeasibleGrid(format!("{what} cell is off the grid")));
        }
        if grid.is_blocked(c) {
            return Err(Error::InfeasibleGrid(format!("{what} cell is blocked")));
        }
    }
    let n = grid.rows * grid.cols;
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    let si = grid.index(start);
    let gi = grid.index(goal);
    g[si] = 0.0;
    let h0 = octile(start, goal);
    open.push(OpenEntry { f: h0, h: h0, index: si });

    while let Some(OpenEntry { index, .. }) = open.pop() {
        if closed[index] {
            continue;
        }
        closed[index] = true;
        if index == gi {
            break;
        }
        let cell = Cell::new(index / grid.cols, index % grid.cols);
        for (next, step) in grid.successors(cell) {
            let ni = grid.index(next);
            if closed[ni] {
                continue;
            }
            let tentative = g[index] + step;
            if tentative < g[ni] {
                g[ni] = tentative;
                parent[ni] = index;
                let h = octile(next, goal);
                open.push(OpenEntry {
                    f: tentative + h,
                    h,
                    index: ni,
                });
            }
        }
    }

    if !closed[gi] {
        return Err(Error::NoPath);
    }
    let mut cells = vec![goal];
    let mut at = gi;
    while at != si {
        at = parent[at];
        cells.push(Cell::new(at / grid.cols, at % grid.cols));
    }
    cells.reverse();
    let waypoints = cells.iter().map(|&c| grid.center(c)).collect();
    Ok(ReferencePath {
        cells,
        waypoints,
        cost: g[gi],
    })
}

/// Rasterizes `world` and plans from `start` to the world goal.
pub fn plan_reference_path(world: &World, start: Point, params: &AStarParams) -> Result<(GridMap, ReferencePath)> {
    let grid = rasterize(world, params.grid_resolution)?;
    let s = grid
        .cell_of(start)
        .ok_or_else(|| Error::InfeasibleGrid("start lies outside the grid".into()))?;
    let g = grid.cell_of(world.goal).expect("rasterize checked the goal cell");
    let path = astar(&grid, s, g)?;
    Ok((grid, path))
}

fn nearest_waypoint(path: &ReferencePath, p: Point, from: usize) -> usize {
    let mut best = from;
    let mut best_d = f64::INFINITY;
    for (i, w) in path.waypoints.iter().enumerate().skip(from) {
        let d = w.distance_squared(p);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Nearest waypoint at or after `from`, and the first waypoint at least
/// `lookahead` of arc length beyond it (or the final waypoint).
pub fn subgoal_from(path: &ReferencePath, p: Point, lookahead: f64, from: usize) -> (usize, usize) {
    assert!(!path.is_empty(), "subgoal of an empty path");
    let from = from.min(path.len() - 1);
    let nearest = nearest_waypoint(path, p, from);
    let mut arc = 0.0;
    let mut i = nearest;
    while i + 1 < path.len() && arc < lookahead {
        arc += path.waypoints[i].distance(path.waypoints[i + 1]);
        i += 1;
    }
    (nearest, i)
}

pub fn subgoal(path: &ReferencePath, state: &State, lookahead: f64) -> Point {
    let (_, i) = subgoal_from(path, state.position(), lookahead, 0);
    path.waypoints[i]
}

/// Subgoal selection that never moves backwards along the path.
#[derive(Debug, Clone)]
pub struct SubgoalTracker {
    path: ReferencePath,
    lookahead: f64,
    cursor: usize,
}

impl SubgoalTracker {
    pub fn new(path: ReferencePath, lookahead: f64) -> Self {
        Self {
            path,
            lookahead,
            cursor: 0,
        }
    }

    pub fn path(&self) -> &ReferencePath {
        &self.path
    }

    /// Index of the waypoint currently nearest to the robot.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn update(&mut self, state: &State) -> Point {
        let (nearest, i) = subgoal_from(&self.path, state.position(), self.lookahead, self.cursor);
        self.cursor = nearest;
        self.path.waypoints[i]
    }
}

/// Baseline squared-distance cost toward the current subgoal.
pub fn astar_mppi_cost(p: Point, world: &World, subgoal: Point, w_obst: f64) -> f64 {
    crate::costs::baseline_cost(p, world, &CostParams::baseline(subgoal).with_w_obst(w_obst))
}
