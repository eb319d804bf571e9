//! Closed-loop Monte Carlo of the certainty-equivalent LQG controller with a
//! Kalman estimator, and builders for the two benchmark scenarios.

mod scenarios;

pub use scenarios::{
    build_formation_scenario, build_formation_scenario_with, build_uav_scenario, build_uav_scenario_with,
    CostMode, FormationConfig, FormationMode, UavConfig,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kalman::{optimal_lqg_cost, propagate_covariance};
use crate::linalg::{self, Mat, Vector};
use crate::model::{Scenario, SensorSet};
use crate::riccati::RiccatiSolution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationRecord {
    pub run_id: u64,
    pub seed: u64,
    /// `x_t`, `t = 1..T+1`.
    pub states: Vec<Vec<f64>>,
    /// `x̂_{t|t}`, `t = 1..T`.
    pub estimates: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub realized_cost: f64,
    /// `Σ_t ‖K_t(x_t − x̂_{t|t})‖²_{M_t}`.
    pub control_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub method: String,
    pub mean_cost: f64,
    pub std_error: f64,
    pub run_count: usize,
    pub analytical_g: f64,
    pub mean_mismatch: f64,
}

struct Step {
    posterior: Mat,
    prior_inv: Option<Mat>,
    /// `(C_{i,t}ᵀ V_{i,t}⁻¹, C_{i,t}, V_{i,t}^{1/2})` per active sensor.
    sensors: Vec<(Mat, Mat, Mat)>,
    noise_sqrt: Mat,
}

/// Everything about a closed loop that does not depend on the seed.
pub struct ClosedLoop<'a> {
    scenario: &'a Scenario,
    sol: &'a RiccatiSolution,
    init_sqrt: Mat,
    steps: Vec<Step>,
}

impl<'a> ClosedLoop<'a> {
    pub fn new(scenario: &'a Scenario, sol: &'a RiccatiSolution, set: &SensorSet) -> Result<Self> {
        let traj = propagate_covariance(scenario, set)?;
        let sys = &scenario.system;
        let mut steps = Vec::with_capacity(sys.horizon());
        for k in 0..sys.horizon() {
            let prior_inv = if set.is_empty() {
                None
            } else {
                Some(linalg::spd_inverse(&traj.prior[k]).ok_or(Error::Singular {
                    what: "predicted covariance",
                    t: Some(k + 1),
                    condition: f64::INFINITY,
                })?)
            };
            let sensors = set
                .iter()
                .map(|i| {
                    let s = &scenario.suite.sensors()[i];
                    let v_inv = linalg::spd_inverse(&s.v[k]).expect("sensor noise is positive definite");
                    (s.c[k].transpose() * v_inv, s.c[k].clone(), linalg::sqrt_psd(&s.v[k]))
                })
                .collect();
            steps.push(Step {
                posterior: traj.posterior[k].clone(),
                prior_inv,
                sensors,
                noise_sqrt: linalg::sqrt_psd(sys.w(k)),
            });
        }
        Ok(ClosedLoop {
            scenario,
            sol,
            init_sqrt: linalg::sqrt_psd(sys.sigma_init()),
            steps,
        })
    }

    pub fn run(&self, run_id: u64, seed: u64) -> SimulationRecord {
        let sys = &self.scenario.system;
        let weights = &self.scenario.weights;
        let n = sys.state_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut normal = |dim: usize| Vector::from_iterator(dim, (0..dim).map(|_| StandardNormal.sample(&mut rng)));

        let mut x = sys.x1_mean() + &self.init_sqrt * normal(n);
        let mut x_pred = sys.x1_mean().clone();
        let mut states = vec![x.iter().copied().collect()];
        let mut estimates = Vec::with_capacity(self.steps.len());
        let mut controls = Vec::with_capacity(self.steps.len());
        let mut cost = 0.0;
        let mut mismatch = 0.0;
        for (k, step) in self.steps.iter().enumerate() {
            let x_hat = match &step.prior_inv {
                None => x_pred.clone(),
                Some(prior_inv) => {
                    let mut info = prior_inv * &x_pred;
                    for (gain, c, v_sqrt) in &step.sensors {
                        let y = c * &x + v_sqrt * normal(c.nrows());
                        info += gain * y;
                    }
                    &step.posterior * info
                }
            };
            let u = &self.sol.k[k] * &x_hat;
            let error = &self.sol.k[k] * (&x - &x_hat);
            mismatch += error.dot(&(&self.sol.m[k] * &error));

            let w = &step.noise_sqrt * normal(n);
            x = sys.a(k) * &x + sys.b(k) * &u + w;
            x_pred = sys.a(k) * &x_hat + sys.b(k) * &u;
            cost += x.dot(&(weights.q(k) * &x)) + u.dot(&(weights.r(k) * &u));

            states.push(x.iter().copied().collect());
            estimates.push(x_hat.iter().copied().collect());
            controls.push(u.iter().copied().collect());
        }
        SimulationRecord {
            run_id,
            seed,
            states,
            estimates,
            controls,
            realized_cost: cost,
            control_mismatch: mismatch,
        }
    }
}

/// One closed-loop trajectory with sensors `set`.
pub fn run_closed_loop(
    scenario: &Scenario,
    sol: &RiccatiSolution,
    set: &SensorSet,
    seed: u64,
) -> Result<SimulationRecord> {
    Ok(ClosedLoop::new(scenario, sol, set)?.run(0, seed))
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// `runs` independent closed loops seeded `base_seed + run_id`.
pub fn monte_carlo(
    scenario: &Scenario,
    sol: &RiccatiSolution,
    set: &SensorSet,
    runs: usize,
    base_seed: u64,
    method: &str,
) -> Result<MonteCarloSummary> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    let sim = ClosedLoop::new(scenario, sol, set)?;
    let records: Vec<(f64, f64)> = (0..runs as u64)
        .into_par_iter()
        .map(|id| {
            let r = sim.run(id, base_seed.wrapping_add(id));
            (r.realized_cost, r.control_mismatch)
        })
        .collect();
    let costs: Vec<f64> = records.iter().map(|r| r.0).collect();
    let mismatches: Vec<f64> = records.iter().map(|r| r.1).collect();
    let mean = pairwise_sum(&costs) / runs as f64;
    let std_error = if runs > 1 {
        let squares: Vec<f64> = costs.iter().map(|c| (c - mean).powi(2)).collect();
        (pairwise_sum(&squares) / (runs - 1) as f64).sqrt() / (runs as f64).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloSummary {
        method: method.to_string(),
        mean_cost: mean,
        std_error,
        run_count: runs,
        analytical_g: optimal_lqg_cost(scenario, sol, set)?,
        mean_mismatch: pairwise_sum(&mismatches) / runs as f64,
    })
}
