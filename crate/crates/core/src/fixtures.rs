//! Small hand-checkable scenarios.
//!
//! Both are scalar (`n = m = 1`), single-step, with `A = B = Q = R = 1`,
//! `W = 0`, zero initial mean and unit initial covariance, so that
//! `S₁ = 1, N₁ = ½, M₁ = 2, K₁ = −½, Θ₁ = ½`.

use crate::linalg::{Mat, Vector};
use crate::model::{LqgWeights, LtvSystem, Scenario, Sensor, SensorSuite};

fn scalar(v: f64) -> Mat {
    Mat::from_element(1, 1, v)
}

fn scalar_with_sensors(sensors: Vec<Sensor>) -> Scenario {
    let system = LtvSystem::new(
        vec![scalar(1.0)],
        vec![scalar(1.0)],
        vec![scalar(0.0)],
        scalar(1.0),
        Vector::zeros(1),
    )
    .expect("valid scalar system");
    let suite = SensorSuite::new(sensors, 1, 1).expect("valid scalar suite");
    let weights = LqgWeights::new(vec![scalar(1.0)], vec![scalar(1.0)]).expect("valid weights");
    Scenario::new(system, suite, weights, None, None).expect("valid scenario")
}

/// Sensor `a` (id 0): `C = 1, V = 1`, cost 1. Sensor `b` (id 1): `C = 1, V = ½`, cost 2.
///
/// `f(∅) = ½, f({a}) = ¼, f({b}) = ⅙, f({a, b}) = ⅛`.
pub fn two_sensor_scalar() -> Scenario {
    scalar_with_sensors(vec![
        Sensor::time_invariant(0, scalar(1.0), scalar(1.0), 1.0, 1).labeled("a"),
        Sensor::time_invariant(1, scalar(1.0), scalar(0.5), 2.0, 1).labeled("b"),
    ])
}

/// Only sensor `a` of [`two_sensor_scalar`].
pub fn one_sensor_scalar() -> Scenario {
    scalar_with_sensors(vec![Sensor::time_invariant(0, scalar(1.0), scalar(1.0), 1.0, 1).labeled("a")])
}
