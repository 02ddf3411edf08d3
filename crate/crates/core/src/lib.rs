//! Model Predictive Path Integral control with a repulsive-potential-
//! augmented cost, an A*-guided baseline, a unicycle simulator, and
//! numerical checks of the local-minima properties of the cost.

pub mod analysis;
pub mod benchmark;
pub mod costs;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod mppi;
pub mod planners;

pub use domain::{
    normalize_angle, AStarParams, Control, ControlBounds, ControlSequence, CostMode, CostParams, MppiParams,
    PlannerKind, Point, Rect, RectObstacle, RepulsionSign, ScenarioConfig, State, World,
};
pub use dynamics::Trajectory;
pub use error::{Error, Result};
pub use mppi::{MppiPlanner, PlanDiagnostics, RolloutBatch};
pub use benchmark::{Outcome, SuiteConfig, TrialResult};
