//! Sampling-based MPPI controller.
//!
//! One planning step draws `K` Gaussian perturbations of the nominal
//! sequence, clips and simulates each, scores them with
//! [`rollout_cost`](crate::costs::rollout_cost), and moves the nominal
//! toward the softmin-weighted average of the sampled sequences. The
//! result is shifted by one step and reused as the next warm start.
//!
//! Reproducibility: noise for rollout `k` comes from its own ChaCha stream
//! keyed by a per-step seed, and the weighted reduction is a plain
//! sequential sum over `k`. Parallel evaluation is therefore bit-identical
//! to a sequential loop regardless of the worker count.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::costs::rollout_cost;
use crate::domain::{Control, ControlBounds, ControlSequence, CostParams, MppiParams, State, World};
use crate::dynamics::{clip, rollout, Trajectory};
use crate::error::{Error, Result};

/// Raw control-space noise, `samples × horizon`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbations {
    samples: usize,
    horizon: usize,
    data: Vec<Control>,
}

impl Perturbations {
    pub fn zeros(samples: usize, horizon: usize) -> Self {
        Self {
            samples,
            horizon,
            data: vec![Control::ZERO; samples * horizon],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Control>>) -> Result<Self> {
        let horizon = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != horizon) {
            return Err(Error::LengthMismatch {
                expected: horizon,
                found: bad.len(),
            });
        }
        Ok(Self {
            samples: rows.len(),
            horizon,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn row(&self, k: usize) -> &[Control] {
        &self.data[k * self.horizon..(k + 1) * self.horizon]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Control]> {
        self.data.chunks(self.horizon.max(1)).take(self.samples)
    }
}

/// Draws i.i.d. zero-mean Gaussian noise with per-channel variances.
///
/// Consumes one `u64` from `rng` and expands it into one independent
/// ChaCha stream per sample.
pub fn sample_perturbations(rng: &mut ChaCha8Rng, samples: usize, horizon: usize, variance: [f64; 2]) -> Perturbations {
    let seed: u64 = rng.gen();
    let std = [variance[0].sqrt(), variance[1].sqrt()];
    let mut data = vec![Control::ZERO; samples * horizon];
    data.par_chunks_mut(horizon.max(1)).enumerate().for_each(|(k, row)| {
        let mut stream = ChaCha8Rng::seed_from_u64(seed);
        stream.set_stream(k as u64);
        for u in row {
            let a: f64 = StandardNormal.sample(&mut stream);
            let b: f64 = StandardNormal.sample(&mut stream);
            *u = Control::new(std[0] * a, std[1] * b);
        }
    });
    Perturbations { samples, horizon, data }
}

/// Everything produced by evaluating one set of perturbations.
#[derive(Debug, Clone)]
pub struct RolloutBatch {
    pub perturbations: Perturbations,
    /// `clip(nominal + noise_k)` for each sample.
    pub perturbed: Vec<ControlSequence>,
    pub trajectories: Vec<Trajectory>,
    pub costs: Vec<f64>,
    /// Smallest entry of `costs`.
    pub rho: f64,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn argmin(&self) -> usize {
        self.costs
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (k, &c)| if c < best.1 { (k, c) } else { best })
            .0
    }
}

fn evaluate_one(
    state: State,
    nominal: &ControlSequence,
    noise: &[Control],
    world: &World,
    cost: &CostParams,
    mppi: &MppiParams,
) -> Result<(ControlSequence, Trajectory, f64)> {
    let perturbed: ControlSequence = nominal
        .iter()
        .zip(noise)
        .map(|(&n, &e)| clip(n + e, &mppi.bounds))
        .collect::<Vec<_>>()
        .into();
    let traj = rollout(state, &perturbed, mppi.dt, &mppi.bounds)?;
    let j = rollout_cost(&traj, nominal, &perturbed, world, cost, mppi)?;
    Ok((perturbed, traj, j))
}

/// Simulates and scores every perturbation of `nominal` in parallel.
pub fn evaluate_rollouts(
    state: State,
    nominal: &ControlSequence,
    noise: Perturbations,
    world: &World,
    cost: &CostParams,
    mppi: &MppiParams,
) -> Result<RolloutBatch> {
    if noise.horizon() != nominal.len() {
        return Err(Error::LengthMismatch {
            expected: nominal.len(),
            found: noise.horizon(),
        });
    }
    if noise.samples() == 0 {
        return Err(Error::config("rollout batch needs at least one sample"));
    }
    let results: Vec<_> = (0..noise.samples())
        .into_par_iter()
        .map(|k| evaluate_one(state, nominal, noise.row(k), world, cost, mppi))
        .collect::<Result<_>>()?;
    let mut perturbed = Vec::with_capacity(results.len());
    let mut trajectories = Vec::with_capacity(results.len());
    let mut costs = Vec::with_capacity(results.len());
    for (u, t, j) in results {
        perturbed.push(u);
        trajectories.push(t);
        costs.push(j);
    }
    let rho = costs.iter().copied().fold(f64::INFINITY, f64::min);
    if !rho.is_finite() {
        return Err(Error::NonFinite("rollout cost"));
    }
    Ok(RolloutBatch {
        perturbations: noise,
        perturbed,
        trajectories,
        costs,
        rho,
    })
}

/// Unnormalized importance weights `exp(-(J_k - ρ)/λ)`; the best sample
/// always gets weight exactly 1.
pub fn importance_weights(costs: &[f64], lambda: f64) -> Vec<f64> {
    let rho = costs.iter().copied().fold(f64::INFINITY, f64::min);
    costs.iter().map(|&j| (-(j - rho) / lambda).exp()).collect()
}

/// `(Σw)² / Σw²`.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let (s, s2) = weights.iter().fold((0.0, 0.0), |(s, s2), &w| (s + w, s2 + w * w));
    s * s / s2
}

/// The importance-sampled update: `û_t + Σ_k w_k δu_{t,k} / Σ_k w_k`,
/// clipped to the input bounds. `δu` is measured from the nominal to the
/// clipped sample that was actually simulated.
pub fn update_controls(
    batch: &RolloutBatch,
    nominal: &ControlSequence,
    lambda: f64,
    bounds: &ControlBounds,
) -> Result<ControlSequence> {
    if batch.is_empty() {
        return Err(Error::config("cannot update from an empty batch"));
    }
    let weights = importance_weights(&batch.costs, lambda);
    let total: f64 = weights.iter().sum();
    let mut acc = vec![Control::ZERO; nominal.len()];
    for (w, seq) in weights.iter().zip(&batch.perturbed) {
        if *w == 0.0 {
            continue;
        }
        for ((a, u), n) in acc.iter_mut().zip(seq.iter()).zip(nominal.iter()) {
            let du = *u - *n;
            a.v += w * du.v;
            a.omega += w * du.omega;
        }
    }
    let updated = nominal
        .iter()
        .zip(acc)
        .map(|(&n, a)| clip(Control::new(n.v + a.v / total, n.omega + a.omega / total), bounds))
        .collect::<Vec<_>>();
    Ok(updated.into())
}

/// Receding-horizon warm start: drop the first input, repeat the last.
pub fn shift_warm_start(seq: &ControlSequence) -> ControlSequence {
    let Some(&last) = seq.0.last() else {
        return seq.clone();
    };
    let mut out = Vec::with_capacity(seq.len());
    out.extend_from_slice(&seq.0[1..]);
    out.push(last);
    out.into()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanDiagnostics {
    pub rho: f64,
    pub effective_sample_size: f64,
    /// Wall-clock time of sampling, evaluation and update.
    pub optimization_time: Duration,
}

/// Controller state carried between planning steps.
#[derive(Debug, Clone)]
pub struct MppiPlanner {
    params: MppiParams,
    nominal: ControlSequence,
    rng: ChaCha8Rng,
}

impl MppiPlanner {
    pub fn new(params: MppiParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            nominal: ControlSequence::zeros(params.horizon),
            rng: ChaCha8Rng::seed_from_u64(seed),
            params,
        })
    }

    pub fn params(&self) -> &MppiParams {
        &self.params
    }

    pub fn nominal(&self) -> &ControlSequence {
        &self.nominal
    }

    pub fn set_nominal(&mut self, nominal: ControlSequence) -> Result<()> {
        if nominal.len() != self.params.horizon {
            return Err(Error::LengthMismatch {
                expected: self.params.horizon,
                found: nominal.len(),
            });
        }
        self.nominal = nominal;
        Ok(())
    }

    pub fn sample(&mut self) -> Perturbations {
        sample_perturbations(
            &mut self.rng,
            self.params.samples,
            self.params.horizon,
            self.params.noise_variance,
        )
    }

    pub fn evaluate(&mut self, state: State, world: &World, cost: &CostParams) -> Result<RolloutBatch> {
        let noise = self.sample();
        evaluate_rollouts(state, &self.nominal, noise, world, cost, &self.params)
    }

    pub fn update_controls(&self, batch: &RolloutBatch) -> Result<ControlSequence> {
        update_controls(batch, &self.nominal, self.params.lambda, &self.params.bounds)
    }

    /// One full MPPI iteration. Returns the first optimized input and stores
    /// the shifted solution as the next nominal.
    pub fn plan(&mut self, state: State, world: &World, cost: &CostParams) -> Result<(Control, PlanDiagnostics)> {
        let start = Instant::now();
        let batch = self.evaluate(state, world, cost)?;
        let updated = self.update_controls(&batch)?;
        let elapsed = start.elapsed();
        let weights = importance_weights(&batch.costs, self.params.lambda);
        let control = updated[0];
        self.nominal = shift_warm_start(&updated);
        Ok((
            control,
            PlanDiagnostics {
                rho: batch.rho,
                effective_sample_size: effective_sample_size(&weights),
                optimization_time: elapsed,
            },
        ))
    }
}
