use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario JSON: {0}")]
    Parse(#[from] serde_json::Error),

    /// Matrix shapes disagree. `t` is the 1-based time index when the field is a sequence.
    #[error("dimension mismatch in `{field}`{}: {detail}", at_time(*.t))]
    Dimension {
        field: String,
        t: Option<usize>,
        detail: String,
    },

    #[error("`{field}`{} is not symmetric (asymmetry {asymmetry:.3e})", at_time(*.t))]
    NotSymmetric {
        field: String,
        t: Option<usize>,
        asymmetry: f64,
    },

    #[error("{what} not positive {kind} (`{field}`{}, min eigenvalue {min_eigenvalue:.3e})", at_time(*.t))]
    Indefinite {
        what: &'static str,
        kind: &'static str,
        field: String,
        t: Option<usize>,
        min_eigenvalue: f64,
    },

    #[error("sensor ids must be unique and contiguous from 0: {0}")]
    SensorIds(String),

    #[error("sensor {0} is not in the suite")]
    UnknownSensor(usize),

    #[error("{what} is numerically singular{} (condition number {condition:.3e})", at_time(*.t))]
    Singular {
        what: &'static str,
        t: Option<usize>,
        condition: f64,
    },

    #[error("infeasible: f(V) = {f_all} exceeds the reduced bound {kappa_bar}")]
    Infeasible { f_all: f64, kappa_bar: f64 },

    #[error("ground set of {size} sensors exceeds the enumeration cap of {cap}")]
    EnumerationCap { size: usize, cap: usize },

    #[error("scenario is missing `{0}`")]
    MissingParameter(&'static str),

    #[error("mandatory sensors cost {cost} which exceeds the budget {budget}")]
    MandatoryOverBudget { cost: f64, budget: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn at_time(t: Option<usize>) -> String {
    match t {
        Some(t) => format!(" at t = {t}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn dim(field: impl Into<String>, t: Option<usize>, detail: impl Into<String>) -> Self {
        Error::Dimension {
            field: field.into(),
            t,
            detail: detail.into(),
        }
    }
}
