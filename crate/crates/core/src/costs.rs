//! Stage/terminal costs and the rollout cost.
//!
//! Two stage costs are provided. The baseline is the squared distance to
//! the goal; the repulsive-potential-augmented (RPA) cost replaces it with
//! the plain distance minus an `alpha`-scaled distance from a known local
//! minimum:
//!
//! ```text
//! g(p) = ‖goal − p‖ − α‖minimum − p‖
//! ```
//!
//! Both add `w_obst` whenever `p` is inside an inflated obstacle, and both
//! use the same function for the stage and terminal cost.

use crate::domain::{CostMode, CostParams, MppiParams, Point, World};
use crate::dynamics::Trajectory;
use crate::domain::ControlSequence;
use crate::error::{Error, Result};

/// 1 if `p` is inside (or on the boundary of) any inflated obstacle.
#[inline]
pub fn indicator(p: Point, world: &World) -> u8 {
    world.in_collision(p) as u8
}

/// `‖goal − p‖² + w_obst · 1(p)`.
#[inline]
pub fn baseline_cost(p: Point, world: &World, params: &CostParams) -> f64 {
    params.goal.distance_squared(p) + params.w_obst * f64::from(indicator(p, world))
}

/// The obstacle-free part of the RPA cost.
///
/// Panics if `params.minimum` is unset; validated RPA parameters always
/// carry one.
#[inline]
pub fn potential_g(p: Point, params: &CostParams) -> f64 {
    let minimum = params.minimum.expect("rpa potential needs a local-minimum point");
    params.goal.distance(p) + params.repulsion.factor() * params.alpha * minimum.distance(p)
}

#[inline]
pub fn rpa_cost(p: Point, world: &World, params: &CostParams) -> f64 {
    potential_g(p, params) + params.w_obst * f64::from(indicator(p, world))
}

/// Stage cost for whichever mode `params` selects.
#[inline]
pub fn stage_cost(p: Point, world: &World, params: &CostParams) -> f64 {
    match params.mode {
        CostMode::Baseline => baseline_cost(p, world, params),
        CostMode::Rpa => rpa_cost(p, world, params),
    }
}

/// Closed-form gradient of [`potential_g`]. Undefined at the goal and at the
/// local minimum, where the distance terms have a kink.
pub fn grad_g(p: Point, params: &CostParams) -> Result<(f64, f64)> {
    let minimum = params
        .minimum
        .ok_or_else(|| Error::config("rpa potential needs a local-minimum point"))?;
    let d_goal = params.goal.distance(p);
    let d_min = minimum.distance(p);
    if d_goal == 0.0 || d_min == 0.0 {
        return Err(Error::NonDifferentiablePoint(p));
    }
    let k = params.repulsion.factor() * params.alpha;
    Ok((
        (p.x - params.goal.x) / d_goal + k * (p.x - minimum.x) / d_min,
        (p.y - params.goal.y) / d_goal + k * (p.y - minimum.y) / d_min,
    ))
}

/// `λ · Σ_t ûᵀ Σ⁻¹ u` for a diagonal Σ.
pub fn control_cost(nominal: &ControlSequence, perturbed: &ControlSequence, mppi: &MppiParams) -> Result<f64> {
    if nominal.len() != perturbed.len() {
        return Err(Error::LengthMismatch {
            expected: nominal.len(),
            found: perturbed.len(),
        });
    }
    let [sv, sw] = mppi.noise_variance;
    let sum: f64 = nominal
        .iter()
        .zip(perturbed.iter())
        .map(|(n, u)| n.v * u.v / sv + n.omega * u.omega / sw)
        .sum();
    Ok(mppi.lambda * sum)
}

/// Cost of one rollout: `φ(x_T) + Σ_{t<T} [c(x_t) + λ ûₜᵀ Σ⁻¹ uₜ]`.
///
/// `perturbed` should hold the clipped inputs that generated `traj`.
pub fn rollout_cost(
    traj: &Trajectory,
    nominal: &ControlSequence,
    perturbed: &ControlSequence,
    world: &World,
    params: &CostParams,
    mppi: &MppiParams,
) -> Result<f64> {
    if traj.len() != perturbed.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: perturbed.len() + 1,
            found: traj.len(),
        });
    }
    let control = control_cost(nominal, perturbed, mppi)?;
    let stage: f64 = traj.states[..traj.len() - 1]
        .iter()
        .map(|s| stage_cost(s.position(), world, params))
        .sum();
    let terminal = stage_cost(traj.last().position(), world, params);
    Ok(terminal + stage + control)
}

/// Cost-to-go of holding still at `p` for `horizon` steps under the zero
/// control sequence: `(T + 1) · c(p)`, the control term being zero.
pub fn cost_to_go_const(p: Point, horizon: usize, world: &World, params: &CostParams) -> f64 {
    (horizon as f64 + 1.0) * stage_cost(p, world, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Control, ControlBounds, Rect, RectObstacle, RepulsionSign, State};
    use crate::dynamics::rollout;
    use proptest::prelude::*;

    fn open_world(goal: Point) -> World {
        World {
            bounds: Rect::new(Point::new(-20.0, -20.0), Point::new(20.0, 20.0)),
            goal,
            goal_tolerance: 1.0,
            obstacles: vec![],
        }
    }

    fn walled_world() -> World {
        World {
            obstacles: vec![RectObstacle::new(Point::new(3.0, 4.0), 2.0, 2.0, 0.5)],
            ..open_world(Point::new(0.0, 10.0))
        }
    }

    fn analysis_params() -> CostParams {
        CostParams::rpa(Point::new(0.0, 10.0), Point::new(0.0, 0.0), 0.75)
    }

    #[test]
    fn indicator_examples() {
        let w = walled_world();
        assert_eq!(indicator(Point::new(3.0, 4.0), &w), 1);
        assert_eq!(indicator(Point::new(100.0, 100.0), &w), 0);
        // Inflated footprint spans x in [1.5, 4.5].
        assert_eq!(indicator(Point::new(4.5, 4.0), &w), 1);
        assert_eq!(indicator(Point::new(4.5 - 1e-9, 4.0), &w), 1);
        assert_eq!(indicator(Point::new(4.5 + 1e-9, 4.0), &w), 0);
    }

    #[test]
    fn baseline_examples() {
        let goal = Point::new(0.0, 10.0);
        let w = open_world(goal);
        let p = CostParams::baseline(goal);
        assert_eq!(baseline_cost(goal, &w, &p), 0.0);
        assert_eq!(baseline_cost(Point::new(3.0, 4.0), &w, &p), 45.0);
        let walled = walled_world();
        assert_eq!(baseline_cost(Point::new(3.0, 4.0), &walled, &p), 1_000_045.0);
    }

    #[test]
    fn potential_examples() {
        let p = analysis_params();
        assert_eq!(potential_g(Point::new(0.0, 0.0), &p), 10.0);
        assert_eq!(potential_g(Point::new(0.0, 10.0), &p), -7.5);
        let expected = 45f64.sqrt() - 0.75 * 5.0;
        assert!((potential_g(Point::new(3.0, 4.0), &p) - expected).abs() < 1e-12);
        assert!((expected - 2.958_203_932_499_369).abs() < 1e-12);
        // The additive variant, for comparison.
        let add = p.with_repulsion(RepulsionSign::Add);
        assert!((potential_g(Point::new(3.0, 4.0), &add) - 10.458_203_932_499_369).abs() < 1e-12);
    }

    #[test]
    fn rpa_examples() {
        let p = analysis_params();
        let w = walled_world();
        assert_eq!(rpa_cost(p.goal, &w, &p), potential_g(p.goal, &p));
        let inside = Point::new(3.0, 4.0);
        assert_eq!(rpa_cost(inside, &w, &p), potential_g(inside, &p) + 1.0e6);
    }

    #[test]
    fn grad_is_undefined_at_singular_points() {
        let p = analysis_params();
        assert!(matches!(grad_g(Point::new(0.0, 0.0), &p), Err(Error::NonDifferentiablePoint(_))));
        assert!(matches!(grad_g(Point::new(0.0, 10.0), &p), Err(Error::NonDifferentiablePoint(_))));
    }

    #[test]
    fn grad_signs_in_analysis_frame() {
        let p = analysis_params();
        let bound = 10.0 * (0.75f64.powi(2) / (1.0 - 0.75f64.powi(2))).sqrt();
        assert!((bound - 11.338_934_190_276_817).abs() < 1e-9);
        assert!(grad_g(Point::new(5.0, 0.0), &p).unwrap().0 < 0.0);
        assert!(grad_g(Point::new(12.0, 0.0), &p).unwrap().0 > 0.0);
        for &(x, y) in &[(0.5, 0.0), (-3.0, 2.0), (4.0, 4.0), (0.0, 1.0), (7.0, 3.5)] {
            assert!(grad_g(Point::new(x, y), &p).unwrap().1 < 0.0);
        }
    }

    fn central_diff(f: impl Fn(Point) -> f64, p: Point, h: f64) -> (f64, f64) {
        (
            (f(Point::new(p.x + h, p.y)) - f(Point::new(p.x - h, p.y))) / (2.0 * h),
            (f(Point::new(p.x, p.y + h)) - f(Point::new(p.x, p.y - h))) / (2.0 * h),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn grad_matches_finite_differences(x in -15.0f64..15.0, y in -15.0f64..25.0, alpha in 0.05f64..0.95) {
            let mut params = analysis_params();
            params.alpha = alpha;
            let p = Point::new(x, y);
            prop_assume!(p.distance(params.goal) > 1e-3 && p.distance(params.minimum.unwrap()) > 1e-3);
            let (gx, gy) = grad_g(p, &params).unwrap();
            let (fx, fy) = central_diff(|q| potential_g(q, &params), p, 1e-6);
            let scale = gx.abs().max(gy.abs()).max(1.0);
            prop_assert!((gx - fx).abs() <= 1e-5 * scale, "x: {} vs {}", gx, fx);
            prop_assert!((gy - fy).abs() <= 1e-5 * scale, "y: {} vs {}", gy, fy);
        }
    }

    #[test]
    fn rollout_cost_examples() {
        let goal = Point::new(0.0, 0.0);
        let w = open_world(goal);
        let params = CostParams::baseline(goal);
        let mppi = MppiParams::default().with_horizon(3);
        let b = ControlBounds::default();
        let zeros = ControlSequence::zeros(3);
        let at_goal = State::new(0.0, 0.0, 0.0).unwrap();
        let traj = rollout(at_goal, &zeros, 0.1, &b).unwrap();
        assert_eq!(rollout_cost(&traj, &zeros, &zeros, &w, &params, &mppi).unwrap(), 0.0);

        // Zero nominal annihilates the control term.
        let moving = ControlSequence::constant(Control::new(0.7, 0.3), 3);
        let traj = rollout(at_goal, &moving, 0.1, &b).unwrap();
        let expected: f64 = traj.states.iter().map(|s| baseline_cost(s.position(), &w, &params)).sum();
        assert_eq!(rollout_cost(&traj, &zeros, &moving, &w, &params, &mppi).unwrap(), expected);
    }

    #[test]
    fn rollout_cost_hand_evaluation() {
        // Stationary at a point with c = φ = 2: squared distance 2 from the goal.
        let goal = Point::new(1.0, 1.0);
        let w = open_world(goal);
        let params = CostParams::baseline(goal);
        let mppi = MppiParams {
            lambda: 0.1,
            noise_variance: [1.0, 1.0],
            ..MppiParams::default().with_horizon(1)
        };
        let traj = Trajectory {
            states: vec![State::new(0.0, 0.0, 0.0).unwrap(); 2],
        };
        let nominal = ControlSequence::constant(Control::new(1.0, 0.0), 1);
        let perturbed = ControlSequence::constant(Control::new(0.5, 0.2), 1);
        let j = rollout_cost(&traj, &nominal, &perturbed, &w, &params, &mppi).unwrap();
        assert!((j - 4.05).abs() < 1e-12);
    }

    #[test]
    fn rollout_cost_rejects_length_mismatch() {
        let w = open_world(Point::new(0.0, 0.0));
        let params = CostParams::baseline(w.goal);
        let mppi = MppiParams::default();
        let traj = Trajectory {
            states: vec![State::new(0.0, 0.0, 0.0).unwrap(); 3],
        };
        let seq = ControlSequence::zeros(3);
        assert!(matches!(
            rollout_cost(&traj, &seq, &seq, &w, &params, &mppi),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(control_cost(&ControlSequence::zeros(2), &seq, &mppi).is_err());
    }

    #[test]
    fn cost_to_go_examples() {
        let params = analysis_params();
        let w = open_world(params.goal);
        let p = Point::new(3.0, 4.0);
        let expected = 51.0 * (45f64.sqrt() - 3.75);
        assert!((cost_to_go_const(p, 50, &w, &params) - expected).abs() < 1e-9);
        assert!((expected - 150.868_400_557_467_8).abs() < 1e-9);
        assert_eq!(cost_to_go_const(params.goal, 50, &w, &params), 51.0 * -7.5);
    }

    proptest! {
        #[test]
        fn cost_to_go_equals_stationary_rollout(x in -15.0f64..15.0, y in -15.0f64..15.0, horizon in 1usize..80) {
            let params = analysis_params();
            let w = walled_world();
            let p = Point::new(x, y);
            prop_assume!(indicator(p, &w) == 0);
            let mppi = MppiParams::default().with_horizon(horizon);
            let zeros = ControlSequence::zeros(horizon);
            let traj = rollout(State::new(x, y, 0.3).unwrap(), &zeros, mppi.dt, &mppi.bounds).unwrap();
            let j = rollout_cost(&traj, &zeros, &zeros, &w, &params, &mppi).unwrap();
            let c = cost_to_go_const(p, horizon, &w, &params);
            prop_assert!((j - c).abs() <= 1e-9 * c.abs().max(1.0));
        }
    }
}
