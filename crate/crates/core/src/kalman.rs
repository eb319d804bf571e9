//! Kalman covariance propagation for a fixed sensor set and the set
//! functions built on it:
//!
//! * `f(S) = Σ_t tr(Θ_t Σ_{t|t}(S))`, the sensing objective;
//! * `g(S)`, the optimal LQG cost with sensors `S` (f plus constants);
//! * the average log-determinant used by the estimation-only baseline.
//!
//! The initial covariance is the prior `Σ_{1|0}`; a measurement update is
//! applied at every step including `t = 1`.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, PD_TOL};
use crate::model::{Scenario, SensorSet, SensorSuite};
use crate::riccati::RiccatiSolution;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceTrajectory {
    /// `Σ_{t|t}(S)`, `t = 1..T`.
    pub posterior: Vec<Mat>,
    /// `Σ_{t|t−1}(S)`, `t = 1..T`; the first entry is the initial covariance.
    pub prior: Vec<Mat>,
}

/// `C̄_{i,t} = V_{i,t}^{−1/2} C_{i,t}` for one sensor, with `C̄ᵀC̄` cached.
#[derive(Debug, Clone)]
pub struct WhitenedSensor {
    pub c_bar: Vec<Mat>,
    pub info: Vec<Mat>,
}

pub fn whiten_suite(suite: &SensorSuite) -> Vec<WhitenedSensor> {
    suite
        .sensors()
        .iter()
        .map(|s| {
            let c_bar: Vec<Mat> = s
                .c
                .iter()
                .zip(&s.v)
                .map(|(c, v)| linalg::inv_sqrt_sym(v, PD_TOL) * c)
                .collect();
            let info = c_bar.iter().map(|cb| linalg::symmetrize(&(cb.transpose() * cb))).collect();
            WhitenedSensor { c_bar, info }
        })
        .collect()
}

fn propagate(scenario: &Scenario, whitened: &[WhitenedSensor], set: &SensorSet) -> Result<CovarianceTrajectory> {
    scenario.suite.check_members(set)?;
    let sys = &scenario.system;
    let horizon = sys.horizon();
    let mut posterior = Vec::with_capacity(horizon);
    let mut prior = Vec::with_capacity(horizon);
    let mut current = sys.sigma_init().clone();
    for k in 0..horizon {
        let post = if set.is_empty() {
            current.clone()
        } else {
            let singular = || Error::Singular {
                what: "predicted covariance",
                t: Some(k + 1),
                condition: f64::INFINITY,
            };
            let chol = linalg::symmetrize(&current).cholesky().ok_or_else(singular)?;
            let min_pivot = chol.l().diagonal().iter().fold(f64::INFINITY, |m, d| m.min(d * d));
            if min_pivot < PD_TOL {
                return Err(singular());
            }
            let mut information = chol.inverse();
            for i in set.iter() {
                information += &whitened[i].info[k];
            }
            linalg::spd_inverse(&information).ok_or_else(singular)?
        };
        let next = linalg::symmetrize(&(sys.a(k) * &post * sys.a(k).transpose() + sys.w(k)));
        prior.push(std::mem::replace(&mut current, next));
        posterior.push(post);
    }
    Ok(CovarianceTrajectory { posterior, prior })
}

/// Forward covariance recursion for the sensors in `set`.
pub fn propagate_covariance(scenario: &Scenario, set: &SensorSet) -> Result<CovarianceTrajectory> {
    propagate(scenario, &whiten_suite(&scenario.suite), set)
}

/// `Σ_t tr(Θ_t Σ_{t|t})`.
pub fn sensing_objective(sol: &RiccatiSolution, traj: &CovarianceTrajectory) -> f64 {
    sol.theta
        .iter()
        .zip(&traj.posterior)
        .map(|(th, p)| linalg::trace_of_product(th, p))
        .sum()
}

/// The part of the optimal LQG cost that no sensor choice can change:
/// `x̄₁ᵀN₁x̄₁ + tr(Σ_init N₁) + Σ_t tr(W_t S_t)`.
pub fn sensor_independent_cost(scenario: &Scenario, sol: &RiccatiSolution) -> f64 {
    let sys = &scenario.system;
    let x = sys.x1_mean();
    let mean_term = (x.transpose() * &sol.n[0] * x)[(0, 0)];
    let init_term = linalg::trace_of_product(sys.sigma_init(), &sol.n[0]);
    let noise_term: f64 = (0..sys.horizon())
        .map(|k| linalg::trace_of_product(sys.w(k), &sol.s[k]))
        .sum();
    mean_term + init_term + noise_term
}

/// Optimal LQG cost `g(S)` attained by the certainty-equivalent controller.
pub fn optimal_lqg_cost(scenario: &Scenario, sol: &RiccatiSolution, set: &SensorSet) -> Result<f64> {
    let traj = propagate_covariance(scenario, set)?;
    Ok(sensor_independent_cost(scenario, sol) + sensing_objective(sol, &traj))
}

/// The LQG bound `κ` translated into a bound on `f`: `g(S) ≤ κ ⇔ f(S) ≤ κ̄`.
pub fn kappa_bar(scenario: &Scenario, sol: &RiccatiSolution) -> Result<f64> {
    Ok(scenario.kappa()? - sensor_independent_cost(scenario, sol))
}

/// `(1/T) Σ_t log det Σ_{t|t}`.
pub fn logdet_objective(traj: &CovarianceTrajectory) -> Result<f64> {
    let mut acc = 0.0;
    for (k, p) in traj.posterior.iter().enumerate() {
        acc += linalg::log_det_spd(p).ok_or(Error::Singular {
            what: "posterior covariance",
            t: Some(k + 1),
            condition: f64::INFINITY,
        })?;
    }
    Ok(acc / traj.posterior.len() as f64)
}

/// Evaluates the set functions of one scenario, memoizing per sensor set.
///
/// Safe to share across threads; the caches sit behind mutexes.
pub struct CostModel<'a> {
    scenario: &'a Scenario,
    sol: &'a RiccatiSolution,
    whitened: Vec<WhitenedSensor>,
    constant: f64,
    f_cache: Mutex<HashMap<SensorSet, f64>>,
    logdet_cache: Mutex<HashMap<SensorSet, f64>>,
}

impl<'a> CostModel<'a> {
    pub fn new(scenario: &'a Scenario, sol: &'a RiccatiSolution) -> Self {
        CostModel {
            scenario,
            sol,
            whitened: whiten_suite(&scenario.suite),
            constant: sensor_independent_cost(scenario, sol),
            f_cache: Mutex::new(HashMap::new()),
            logdet_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn riccati(&self) -> &'a RiccatiSolution {
        self.sol
    }

    pub fn whitened(&self) -> &[WhitenedSensor] {
        &self.whitened
    }

    pub fn ground_set(&self) -> SensorSet {
        self.scenario.suite.ground_set()
    }

    pub fn cost(&self, id: usize) -> f64 {
        self.scenario.suite.cost(id)
    }

    pub fn set_cost(&self, set: &SensorSet) -> f64 {
        set.iter().map(|i| self.cost(i)).sum()
    }

    /// `g(S) − f(S)`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn kappa_bar(&self) -> Result<f64> {
        Ok(self.scenario.kappa()? - self.constant)
    }

    pub fn trajectory(&self, set: &SensorSet) -> Result<CovarianceTrajectory> {
        propagate(self.scenario, &self.whitened, set)
    }

    /// `f(S)` without touching the cache (used by exhaustive searches).
    pub fn f_uncached(&self, set: &SensorSet) -> Result<f64> {
        Ok(sensing_objective(self.sol, &self.trajectory(set)?))
    }

    pub fn f(&self, set: &SensorSet) -> Result<f64> {
        if let Some(&v) = self.f_cache.lock().unwrap().get(set) {
            return Ok(v);
        }
        let v = self.f_uncached(set)?;
        self.f_cache.lock().unwrap().insert(set.clone(), v);
        Ok(v)
    }

    pub fn g(&self, set: &SensorSet) -> Result<f64> {
        Ok(self.f(set)? + self.constant)
    }

    pub fn logdet(&self, set: &SensorSet) -> Result<f64> {
        if let Some(&v) = self.logdet_cache.lock().unwrap().get(set) {
            return Ok(v);
        }
        let v = logdet_objective(&self.trajectory(set)?)?;
        self.logdet_cache.lock().unwrap().insert(set.clone(), v);
        Ok(v)
    }

    pub fn cached_evaluations(&self) -> usize {
        self.f_cache.lock().unwrap().len()
    }
}
