use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpa_mppi::benchmark::{wall_world, WALL_MINIMUM};
use rpa_mppi::mppi::{evaluate_rollouts, sample_perturbations};
use rpa_mppi::planners::plan_reference_path;
use rpa_mppi::{AStarParams, ControlSequence, CostParams, MppiParams, MppiPlanner, Point, State};

fn plan_step(c: &mut Criterion) {
    let world = wall_world(16.0);
    let state = State::new(10.0, 1.0, std::f64::consts::FRAC_PI_2).unwrap();
    let mut group = c.benchmark_group("plan_step");
    group.sample_size(20);
    for horizon in [50, 150] {
        let params = MppiParams::default().with_horizon(horizon);
        let baseline = CostParams::baseline(world.goal);
        let rpa = CostParams::rpa(world.goal, WALL_MINIMUM, 0.75);
        for (name, cost) in [("baseline", baseline), ("rpa", rpa)] {
            group.bench_with_input(BenchmarkId::new(name, horizon), &cost, |b, cost| {
                let mut planner = MppiPlanner::new(params, 0).unwrap();
                b.iter(|| planner.plan(black_box(state), &world, cost).unwrap());
            });
        }
    }
    group.finish();
}

fn rollouts(c: &mut Criterion) {
    let world = wall_world(16.0);
    let params = MppiParams::default();
    let cost = CostParams::rpa(world.goal, WALL_MINIMUM, 0.75);
    let nominal = ControlSequence::zeros(params.horizon);
    let state = State::new(10.0, 1.0, 0.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("sample_perturbations_1000x50", |b| {
        b.iter(|| sample_perturbations(&mut rng, params.samples, params.horizon, params.noise_variance))
    });
    let noise = sample_perturbations(&mut rng, params.samples, params.horizon, params.noise_variance);
    c.bench_function("evaluate_rollouts_1000x50", |b| {
        b.iter(|| evaluate_rollouts(state, &nominal, noise.clone(), &world, &cost, &params).unwrap())
    });
}

fn reference_path(c: &mut Criterion) {
    let mut group = c.benchmark_group("astar_reference_path");
    for width in [4.0, 10.0, 16.0] {
        let world = wall_world(width);
        group.bench_with_input(BenchmarkId::from_parameter(width), &world, |b, world| {
            b.iter(|| plan_reference_path(world, black_box(Point::new(10.0, 1.0)), &AStarParams::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, plan_step, rollouts, reference_path);
criterion_main!(benches);
