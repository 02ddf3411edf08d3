//! Rollout evaluation and control updates at full batch size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpa_mppi::costs::rollout_cost;
use rpa_mppi::dynamics::rollout;
use rpa_mppi::mppi::{evaluate_rollouts, importance_weights, sample_perturbations, update_controls};
use rpa_mppi::{
    Control, ControlBounds, ControlSequence, CostParams, MppiParams, Point, Rect, RectObstacle, State, World,
};

fn world() -> World {
    World {
        bounds: Rect::new(Point::new(0.0, 0.0), Point::new(20.0, 20.0)),
        goal: Point::new(10.0, 18.0),
        goal_tolerance: 1.0,
        obstacles: vec![RectObstacle::new(Point::new(10.0, 10.0), 16.0, 1.0, 0.5)],
    }
}

#[test]
fn parallel_batch_equals_sequential_loop() {
    let params = MppiParams::default();
    let w = world();
    let cost = CostParams::rpa(w.goal, Point::new(10.0, 9.0), 0.75);
    let state = State::new(10.0, 7.0, 1.2).unwrap();
    let nominal = ControlSequence::from(
        (0..params.horizon)
            .map(|t| Control::new(0.5 + 0.01 * t as f64, 0.2 - 0.005 * t as f64))
            .collect::<Vec<_>>(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = sample_perturbations(&mut rng, params.samples, params.horizon, params.noise_variance);
    let rows: Vec<Vec<Control>> = noise.rows().map(<[Control]>::to_vec).collect();
    let batch = evaluate_rollouts(state, &nominal, noise, &w, &cost, &params).unwrap();

    assert_eq!(batch.len(), 1000);
    for (k, row) in rows.iter().enumerate() {
        let perturbed = ControlSequence::from(
            nominal
                .iter()
                .zip(row)
                .map(|(&n, &e)| {
                    let u = n + e;
                    Control::new(u.v.clamp(0.0, 1.0), u.omega.clamp(-0.5, 0.5))
                })
                .collect::<Vec<_>>(),
        );
        let traj = rollout(state, &perturbed, params.dt, &params.bounds).unwrap();
        let j = rollout_cost(&traj, &nominal, &perturbed, &w, &cost, &params).unwrap();
        assert_eq!(batch.perturbed[k], perturbed);
        assert_eq!(batch.costs[k].to_bits(), j.to_bits(), "sample {k}");
    }
    let rho = batch.costs.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(batch.rho, rho);
}

#[test]
fn weights_normalize_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let costs: Vec<f64> = (0..1000).map(|_| rng.gen_range(0.0..500.0)).collect();
    let w = importance_weights(&costs, 0.1);
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let ib = costs.iter().position(|&c| c == best).unwrap();
    assert_eq!(w[ib], 1.0);
    assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
    let total: f64 = w.iter().sum();
    let normalized: f64 = w.iter().map(|x| x / total).sum();
    assert!((normalized - 1.0).abs() < 1e-12);
}

#[test]
fn updates_stay_within_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let bounds = ControlBounds::default();
    let horizon = 5;
    let samples = 8;
    let mut checked = 0;
    while checked < 100_000 {
        let nominal = ControlSequence::from(
            (0..horizon)
                .map(|_| Control::new(rng.gen_range(0.0..=1.0), rng.gen_range(-0.5..=0.5)))
                .collect::<Vec<_>>(),
        );
        let noise = sample_perturbations(&mut rng, samples, horizon, [4.0, 4.0]);
        let mut world = world();
        world.obstacles.clear();
        let params = MppiParams {
            samples,
            horizon,
            ..MppiParams::default()
        };
        let state = State::new(rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0), rng.gen_range(-3.0..3.0)).unwrap();
        let batch = evaluate_rollouts(state, &nominal, noise, &world, &CostParams::baseline(world.goal), &params).unwrap();
        let lambda = 10f64.powf(rng.gen_range(-6.0..1.0));
        let u = update_controls(&batch, &nominal, lambda, &bounds).unwrap();
        for c in u.iter() {
            assert!(bounds.contains(*c), "{c:?} out of bounds");
        }
        checked += 1;
    }
}
