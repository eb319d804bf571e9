//! Multi-robot formation control and UAV navigation benchmarks.
//!
//! Conventions: unit time step, `Σ_init = DᵀD + 0.1·I` with `D` a seeded
//! standard-Gaussian `n×n` matrix, and all randomness drawn from one
//! ChaCha8 stream per seed.

use std::f64::consts::PI;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, Mat, Vector};
use crate::model::{LqgWeights, LtvSystem, Scenario, Sensor, SensorSuite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormationMode {
    /// Every agent weighted `0.1·I₄`.
    Homogeneous,
    /// Agent 0 weighted `10·I₄`, the rest `0.1·I₄`.
    Heterogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    Uniform,
    /// GPS 3, altimeter 2, landmarks 1.
    Heterogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormationConfig {
    /// Circumradius of the target polygon (m).
    pub radius: f64,
    /// Side of the deployment square (m).
    pub area: f64,
}

impl Default for FormationConfig {
    fn default() -> Self {
        FormationConfig { radius: 2.0, area: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavConfig {
    /// Scale of the Gaussian factor `G` in the landmark covariance `0.1·I + GᵀG`.
    pub landmark_scale: f64,
}

impl Default for UavConfig {
    fn default() -> Self {
        UavConfig { landmark_scale: 0.5 }
    }
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn random_initial_covariance(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let d = gaussian_matrix(rng, n, n);
    linalg::symmetrize(&(d.transpose() * d + Mat::identity(n, n) * 0.1))
}

/// `[[I, Δ·I], [0, I]]` and `[0; Δ·I]` for a `dim`-D double integrator, `Δ = 1`.
fn double_integrator(dim: usize) -> (Mat, Mat) {
    let mut a = Mat::identity(2 * dim, 2 * dim);
    a.view_mut((0, dim), (dim, dim)).fill_with_identity();
    let mut b = Mat::zeros(2 * dim, dim);
    b.view_mut((dim, 0), (dim, dim)).fill_with_identity();
    (a, b)
}

fn select_position(n: usize, offset: usize, dim: usize, sign: f64) -> Mat {
    let mut c = Mat::zeros(dim, n);
    for r in 0..dim {
        c[(r, offset + r)] = sign;
    }
    c
}

pub fn build_formation_scenario(agents: usize, horizon: usize, mode: FormationMode, seed: u64) -> Scenario {
    build_formation_scenario_with(agents, horizon, mode, seed, &FormationConfig::default())
}

/// `agents` planar double integrators regulated to a regular polygon.
///
/// Sensors: `gps_i` (ids `0..agents`) observe `p_i` with covariance `2·I₂`;
/// `lidar_i_j` observe `p_j − p_i` with covariance `0.1·I₂`, one per ordered
/// pair. The state is the deviation from the target formation.
pub fn build_formation_scenario_with(
    agents: usize,
    horizon: usize,
    mode: FormationMode,
    seed: u64,
    config: &FormationConfig,
) -> Scenario {
    assert!(agents >= 2, "formation needs at least two agents");
    let n = 4 * agents;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_init = random_initial_covariance(&mut rng, n);

    let mut x1 = Vector::zeros(n);
    let center = config.area / 2.0;
    for i in 0..agents {
        let angle = 2.0 * PI * i as f64 / agents as f64;
        let target = [center + config.radius * angle.cos(), center + config.radius * angle.sin()];
        for (d, &goal) in target.iter().enumerate() {
            let pos: f64 = rng.random_range(0.0..config.area);
            x1[4 * i + d] = pos - goal;
        }
    }

    let (a_block, b_block) = double_integrator(2);
    let a = linalg::block_diag(&vec![a_block; agents]);
    let b = linalg::block_diag(&vec![b_block; agents]);
    let w = linalg::block_diag(&vec![Mat::from_diagonal(&Vector::from_vec(vec![1e-2, 1e-2, 1e-4, 1e-4])); agents]);
    let q_blocks: Vec<Mat> = (0..agents)
        .map(|i| {
            let scale = if i == 0 && mode == FormationMode::Heterogeneous { 10.0 } else { 0.1 };
            Mat::identity(4, 4) * scale
        })
        .collect();
    let q = linalg::block_diag(&q_blocks);
    let r = Mat::identity(2 * agents, 2 * agents);

    let mut sensors = Vec::with_capacity(agents * agents);
    for i in 0..agents {
        let c = select_position(n, 4 * i, 2, 1.0);
        sensors.push(Sensor::time_invariant(i, c, Mat::identity(2, 2) * 2.0, 1.0, horizon).labeled(format!("gps_{i}")));
    }
    for i in 0..agents {
        for j in (0..agents).filter(|&j| j != i) {
            let c = select_position(n, 4 * j, 2, 1.0) + select_position(n, 4 * i, 2, -1.0);
            let id = sensors.len();
            sensors.push(
                Sensor::time_invariant(id, c, Mat::identity(2, 2) * 0.1, 1.0, horizon).labeled(format!("lidar_{i}_{j}")),
            );
        }
    }

    let system = LtvSystem::new(vec![a; horizon], vec![b; horizon], vec![w; horizon], sigma_init, x1)
        .expect("formation system is valid");
    let suite = SensorSuite::new(sensors, horizon, n).expect("formation sensors are valid");
    let weights = LqgWeights::new(vec![q; horizon], vec![r; horizon]).expect("formation weights are valid");
    Scenario::new(system, suite, weights, None, None).expect("formation scenario is valid")
}

pub fn build_uav_scenario(landmarks: usize, horizon: usize, cost_mode: CostMode, seed: u64) -> Scenario {
    build_uav_scenario_with(landmarks, horizon, cost_mode, seed, &UavConfig::default())
}

/// A 3-D double integrator with a GPS (id 0), an altimeter (id 1) and
/// `landmarks` landmark-based position sensors (ids `2..`).
///
/// The initial mean is a position drawn uniformly from `[−10, 10]² × [5, 15]`
/// with zero velocity.
pub fn build_uav_scenario_with(
    landmarks: usize,
    horizon: usize,
    cost_mode: CostMode,
    seed: u64,
    config: &UavConfig,
) -> Scenario {
    assert!(landmarks >= 1, "at least one landmark");
    let n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_init = random_initial_covariance(&mut rng, n);
    let mut x1 = Vector::zeros(n);
    x1[0] = rng.random_range(-10.0..10.0);
    x1[1] = rng.random_range(-10.0..10.0);
    x1[2] = rng.random_range(5.0..15.0);

    let (a, b) = double_integrator(3);
    let q = Mat::from_diagonal(&Vector::from_vec(vec![1e-3, 1e-3, 10.0, 1e-3, 1e-3, 10.0]));
    let (gps_cost, alt_cost) = match cost_mode {
        CostMode::Uniform => (1.0, 1.0),
        CostMode::Heterogeneous => (3.0, 2.0),
    };

    let position = select_position(n, 0, 3, 1.0);
    let mut altimeter = Mat::zeros(1, n);
    altimeter[(0, 2)] = 1.0;
    let mut sensors = vec![
        Sensor::time_invariant(0, position.clone(), Mat::identity(3, 3) * 2.0, gps_cost, horizon).labeled("gps"),
        Sensor::time_invariant(1, altimeter, Mat::from_element(1, 1, 0.25), alt_cost, horizon).labeled("altimeter"),
    ];
    for l in 0..landmarks {
        let g = gaussian_matrix(&mut rng, 3, 3) * config.landmark_scale;
        let v = linalg::symmetrize(&(Mat::identity(3, 3) * 0.1 + g.transpose() * g));
        sensors.push(Sensor::time_invariant(2 + l, position.clone(), v, 1.0, horizon).labeled(format!("landmark_{l}")));
    }

    let system = LtvSystem::new(
        vec![a; horizon],
        vec![b; horizon],
        vec![Mat::identity(n, n); horizon],
        sigma_init,
        x1,
    )
    .expect("uav system is valid");
    let suite = SensorSuite::new(sensors, horizon, n).expect("uav sensors are valid");
    let weights =
        LqgWeights::new(vec![q; horizon], vec![Mat::identity(3, 3); horizon]).expect("uav weights are valid");
    Scenario::new(system, suite, weights, None, None).expect("uav scenario is valid")
}
