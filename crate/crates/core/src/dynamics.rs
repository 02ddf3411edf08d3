//! Discrete-time unicycle model shared by the simulator and the MPPI
//! predictor, plus input clipping.

use crate::domain::{wrap_angle, Control, ControlBounds, ControlSequence, State};
use crate::error::{Error, Result};

/// States visited by a rollout; `states[0]` is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Forward-Euler unicycle step.
pub fn step(state: State, control: Control, dt: f64) -> Result<State> {
    if !control.v.is_finite() || !control.omega.is_finite() || !dt.is_finite() {
        return Err(Error::NonFinite("control or dt"));
    }
    let next = step_unchecked(state, control, dt);
    if !next.x.is_finite() || !next.y.is_finite() {
        return Err(Error::NonFinite("state position"));
    }
    Ok(next)
}

#[inline]
pub(crate) fn step_unchecked(state: State, control: Control, dt: f64) -> State {
    let (sin, cos) = state.theta.sin_cos();
    State {
        x: state.x + control.v * cos * dt,
        y: state.y + control.v * sin * dt,
        theta: wrap_angle(state.theta + control.omega * dt),
    }
}

/// Clamps each channel to its interval independently.
#[inline]
pub fn clip(control: Control, bounds: &ControlBounds) -> Control {
    Control {
        v: control.v.clamp(bounds.v_min, bounds.v_max),
        omega: control.omega.clamp(bounds.omega_min, bounds.omega_max),
    }
}

/// Simulates `seq` from `initial`, clipping every input before it is applied.
pub fn rollout(initial: State, seq: &ControlSequence, dt: f64, bounds: &ControlBounds) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(seq.len() + 1);
    states.push(initial);
    let mut s = initial;
    for &u in seq.iter() {
        s = step(s, clip(u, bounds), dt)?;
        states.push(s);
    }
    Ok(Trajectory { states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn s(x: f64, y: f64, t: f64) -> State {
        State::new(x, y, t).unwrap()
    }

    #[test]
    fn step_examples() {
        let a = step(s(0.0, 0.0, 0.0), Control::new(1.0, 0.0), 0.1).unwrap();
        assert_eq!((a.x, a.y, a.theta), (0.1, 0.0, 0.0));

        let b = step(s(0.0, 0.0, FRAC_PI_2), Control::new(1.0, 0.0), 0.1).unwrap();
        assert!(b.x.abs() < 1e-15);
        assert!((b.y - 0.1).abs() < 1e-15);
        assert_eq!(b.theta, FRAC_PI_2);

        let c = step(s(0.0, 0.0, 0.0), Control::new(0.0, 0.5), 0.1).unwrap();
        assert_eq!((c.x, c.y), (0.0, 0.0));
        assert!((c.theta - 0.05).abs() < 1e-15);
    }

    #[test]
    fn step_rejects_non_finite() {
        assert!(step(s(0.0, 0.0, 0.0), Control::new(f64::NAN, 0.0), 0.1).is_err());
        assert!(step(s(0.0, 0.0, 0.0), Control::new(1.0, 0.0), f64::INFINITY).is_err());
    }

    #[test]
    fn step_wraps_heading() {
        let a = step(s(0.0, 0.0, std::f64::consts::PI), Control::new(0.0, 0.5), 0.1).unwrap();
        assert!(a.theta < 0.0 && a.theta > -std::f64::consts::PI);
    }

    #[test]
    fn clip_examples() {
        let b = ControlBounds::default();
        assert_eq!(clip(Control::new(1.7, 0.2), &b), Control::new(1.0, 0.2));
        assert_eq!(clip(Control::new(0.5, -0.9), &b), Control::new(0.5, -0.5));
        assert_eq!(clip(Control::new(0.5, 0.0), &b), Control::new(0.5, 0.0));
    }

    #[test]
    fn rollout_examples() {
        let b = ControlBounds::default();
        let zero = rollout(s(0.0, 0.0, 0.0), &ControlSequence::zeros(2), 0.1, &b).unwrap();
        assert_eq!(zero.states, vec![s(0.0, 0.0, 0.0); 3]);

        let fwd = rollout(s(0.0, 0.0, 0.0), &ControlSequence::constant(Control::new(1.0, 0.0), 2), 0.1, &b).unwrap();
        let xs: Vec<f64> = fwd.states.iter().map(|s| s.x).collect();
        assert_eq!(xs, vec![0.0, 0.1, 0.2]);
    }

    #[test]
    fn rollout_turning_matches_iterated_step() {
        // Oracle: apply the update equations by hand ten times.
        let (mut x, mut y, mut th) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..10 {
            x += 1.0 * th.cos() * 0.1;
            y += 1.0 * th.sin() * 0.1;
            th += 0.5 * 0.1;
        }
        let traj = rollout(
            s(0.0, 0.0, 0.0),
            &ControlSequence::constant(Control::new(1.0, 0.5), 10),
            0.1,
            &ControlBounds::default(),
        )
        .unwrap();
        let last = traj.last();
        assert_eq!(traj.len(), 11);
        assert!((last.theta - 0.5).abs() < 1e-12);
        assert!((last.theta - th).abs() < 1e-12);
        assert!((last.x - x).abs() < 1e-12 && (last.y - y).abs() < 1e-12);
    }

    #[test]
    fn rollout_clips_inputs() {
        let b = ControlBounds::default();
        let t = rollout(s(0.0, 0.0, 0.0), &ControlSequence::constant(Control::new(5.0, 0.0), 1), 0.1, &b).unwrap();
        assert_eq!(t.states[1].x, 0.1);
    }

    fn arb_control() -> impl Strategy<Value = Control> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(v, w)| Control::new(v, w))
    }

    proptest! {
        #[test]
        fn clip_is_idempotent_and_feasible(u in arb_control()) {
            let b = ControlBounds::default();
            let c = clip(u, &b);
            prop_assert!(b.contains(c));
            prop_assert_eq!(clip(c, &b), c);
        }

        #[test]
        fn rollout_is_deterministic_with_bounded_steps(
            x in -10.0f64..10.0, y in -10.0f64..10.0, th in -4.0f64..4.0,
            us in prop::collection::vec(arb_control(), 1..40),
        ) {
            let b = ControlBounds::default();
            let seq = ControlSequence::from(us);
            let a = rollout(s(x, y, th), &seq, 0.1, &b).unwrap();
            let c = rollout(s(x, y, th), &seq, 0.1, &b).unwrap();
            prop_assert_eq!(&a, &c);
            for (t, w) in a.states.windows(2).enumerate() {
                prop_assert!(w[0].position().distance(w[1].position()) <= b.v_max * 0.1 + 1e-12);
                prop_assert_eq!(w[1], step(w[0], clip(seq[t], &b), 0.1).unwrap());
            }
        }
    }
}
