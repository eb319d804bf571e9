//! Seeded random problem instances for oracle comparisons and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, Mat, Vector};
use crate::model::{LqgWeights, LtvSystem, Scenario, Sensor, SensorSuite};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceConfig {
    pub max_state: usize,
    pub max_horizon: usize,
    pub min_sensors: usize,
    pub max_sensors: usize,
    /// Sensor costs are integers drawn from `1..=max_cost`.
    pub max_cost: u32,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            max_state: 4,
            max_horizon: 5,
            min_sensors: 2,
            max_sensors: 8,
            max_cost: 3,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn gram(rng: &mut ChaCha8Rng, n: usize, scale: f64, shift: f64) -> Mat {
    let g = gaussian(rng, n, n);
    linalg::symmetrize(&((g.transpose() * g) * scale + Mat::identity(n, n) * shift))
}

/// Random dynamics around the identity, rejected until well conditioned.
fn dynamics(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Mat {
    loop {
        let a = Mat::identity(n, n) * 0.9 + gaussian(rng, n, n) * spread;
        if linalg::condition_number(&a) < 1e4 {
            return a;
        }
    }
}

fn assemble(
    system: (Vec<Mat>, Vec<Mat>, Vec<Mat>, Mat, Vector),
    sensors: Vec<Sensor>,
    weights: (Vec<Mat>, Vec<Mat>),
    budget: Option<f64>,
) -> Scenario {
    let horizon = system.0.len();
    let n = system.3.nrows();
    let system = LtvSystem::new(system.0, system.1, system.2, system.3, system.4).expect("random system is valid");
    let suite = SensorSuite::new(sensors, horizon, n).expect("random sensors are valid");
    let weights = LqgWeights::new(weights.0, weights.1).expect("random weights are valid");
    Scenario::new(system, suite, weights, budget, None).expect("random scenario is valid")
}

/// A small time-varying instance with integer sensor costs and a budget
/// drawn between the cheapest sensor and the total cost.
pub fn random_instance(seed: u64, config: &InstanceConfig) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=config.max_state);
    let horizon = rng.random_range(1..=config.max_horizon);
    let m = rng.random_range(1..=n);
    let count = rng.random_range(config.min_sensors..=config.max_sensors);

    let mut a = Vec::with_capacity(horizon);
    let mut b = Vec::with_capacity(horizon);
    let mut w = Vec::with_capacity(horizon);
    let mut q = Vec::with_capacity(horizon);
    let mut r = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        a.push(dynamics(&mut rng, n, 0.3));
        b.push(gaussian(&mut rng, n, m));
        w.push(gram(&mut rng, n, 0.05, 0.01));
        q.push(gram(&mut rng, n, 0.5, 0.0));
        r.push(gram(&mut rng, m, 0.2, 0.5));
    }
    let sigma_init = gram(&mut rng, n, 0.5, 0.2);
    let x1 = Vector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));

    let sensors: Vec<Sensor> = (0..count)
        .map(|id| {
            let p = rng.random_range(1..=2usize.min(n).max(1));
            let c = gaussian(&mut rng, p, n);
            let v = gram(&mut rng, p, 0.5, 0.1);
            let cost = f64::from(rng.random_range(1..=config.max_cost));
            Sensor::time_invariant(id, c, v, cost, horizon)
        })
        .collect();
    let total: f64 = sensors.iter().map(|s| s.cost).sum();
    let cheapest = sensors.iter().map(|s| s.cost).fold(f64::INFINITY, f64::min);
    let budget = rng.random_range(cheapest..=total).round();
    assemble((a, b, w, sigma_init, x1), sensors, (q, r), Some(budget))
}

/// Time-varying instance with invertible `A_t` for the control-theoretic
/// identities. Mixes in zero and rank-deficient state weights, `B = 0`, and
/// fewer inputs than states.
pub fn random_invertible_instance(seed: u64, max_state: usize, max_horizon: usize) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_state);
    let horizon = rng.random_range(1..=max_horizon);
    let m = rng.random_range(1..=n);
    let flavor = rng.random_range(0..4u8);

    let mut a = Vec::with_capacity(horizon);
    let mut b = Vec::with_capacity(horizon);
    let mut w = Vec::with_capacity(horizon);
    let mut q = Vec::with_capacity(horizon);
    let mut r = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        a.push(dynamics(&mut rng, n, 0.4));
        b.push(if flavor == 1 { Mat::zeros(n, m) } else { gaussian(&mut rng, n, m) });
        w.push(gram(&mut rng, n, 0.1, 0.01));
        q.push(match flavor {
            0 => Mat::zeros(n, n),
            2 => {
                let g = gaussian(&mut rng, 1, n);
                g.transpose() * g
            }
            _ => gram(&mut rng, n, 0.5, 0.1),
        });
        r.push(gram(&mut rng, m, 0.2, 0.5));
    }
    let sigma_init = gram(&mut rng, n, 0.5, 0.2);
    let sensors = vec![Sensor::time_invariant(0, Mat::identity(n, n), Mat::identity(n, n), 1.0, horizon)];
    assemble((a, b, w, sigma_init, Vector::zeros(n)), sensors, (q, r), None)
}

/// Candidate instance shaped towards the spectral-bound hypotheses: unit
/// trace whitened sensors, full-rank inputs and a large initial covariance.
/// The hypotheses still have to be checked by the caller.
pub fn random_normalized_instance(seed: u64, max_state: usize, max_sensors: usize) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_state);
    let horizon = rng.random_range(1..=3usize);
    let count = rng.random_range(2..=max_sensors);

    let mut a = Vec::with_capacity(horizon);
    let mut b = Vec::with_capacity(horizon);
    let mut w = Vec::with_capacity(horizon);
    let mut q = Vec::with_capacity(horizon);
    let mut r = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        a.push(dynamics(&mut rng, n, 0.2));
        b.push(dynamics(&mut rng, n, 0.5));
        w.push(gram(&mut rng, n, 0.1, 0.1));
        q.push(gram(&mut rng, n, 0.2, 1.0));
        r.push(gram(&mut rng, n, 0.2, 1.0));
    }
    let scale = rng.random_range(2.0..5.0) * n as f64;
    let sigma_init = gram(&mut rng, n, 0.2, 1.0) * scale;

    let sensors = (0..count)
        .map(|id| {
            let c = gaussian(&mut rng, 1, n);
            let v = Mat::from_element(1, 1, (&c * c.transpose())[(0, 0)]);
            Sensor::time_invariant(id, c, v, f64::from(rng.random_range(1..=3u32)), horizon)
        })
        .collect();
    assemble((a, b, w, sigma_init, Vector::zeros(n)), sensors, (q, r), None)
}

/// A larger time-invariant instance for timing: `sensors` two-dimensional
/// position-like measurements of an `n`-state system.
pub fn random_large_instance(seed: u64, n: usize, sensors: usize, horizon: usize) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n / 2;
    let a = dynamics(&mut rng, n, 0.05);
    let b = gaussian(&mut rng, n, m);
    let w = gram(&mut rng, n, 0.01, 0.01);
    let q = gram(&mut rng, n, 0.1, 0.1);
    let r = Mat::identity(m, m);
    let sigma_init = gram(&mut rng, n, 0.1, 0.5);
    let list = (0..sensors)
        .map(|id| {
            let c = gaussian(&mut rng, 2, n);
            let v = gram(&mut rng, 2, 0.2, 0.1);
            Sensor::time_invariant(id, c, v, 1.0, horizon)
        })
        .collect();
    assemble(
        (vec![a; horizon], vec![b; horizon], vec![w; horizon], sigma_init, Vector::zeros(n)),
        list,
        (vec![q; horizon], vec![r; horizon]),
        Some((sensors / 6) as f64),
    )
}
