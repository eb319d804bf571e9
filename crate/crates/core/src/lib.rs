//! Joint design of LQG controllers and sensor activations for discrete-time,
//! time-varying linear-Gaussian systems.
//!
//! The controller gains come from a backward Riccati recursion that does not
//! depend on the sensors ([`riccati`]). The sensor choice then reduces to a
//! covariance-weighted trace minimization ([`kalman`]) solved greedily or by
//! enumeration ([`selection`]), with a-posteriori guarantees from the
//! supermodularity ratio ([`analysis`]). [`simulate`] runs the closed loop and
//! builds the benchmark scenarios.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod kalman;
pub mod linalg;
pub mod model;
pub mod random;
pub mod riccati;
pub mod selection;
pub mod simulate;

#[doc(hidden)]
pub mod fixtures;

pub use error::{Error, Result};
pub use kalman::CostModel;
pub use model::{load_scenario, LqgWeights, LtvSystem, Scenario, Sensor, SensorSet, SensorSuite};
pub use riccati::{solve_riccati, RiccatiSolution};
pub use selection::{Method, SelectionReport};
