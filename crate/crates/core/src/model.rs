//! Problem data: the time-varying linear system, the sensor suite, the LQG
//! weights and the scenario that bundles them, plus the scenario JSON format.
//!
//! Time indices are 0-based in the API (`k = 0` is the first step) and
//! 1-based in error messages and in the documentation of the file format.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector, PD_TOL, PSD_TOL, SYMMETRY_TOL};

/// A set of sensor ids, kept sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SensorSet(Vec<usize>);

impl SensorSet {
    pub fn empty() -> Self {
        SensorSet(Vec::new())
    }

    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = ids.into_iter().collect();
        SensorSet(set.into_iter().collect())
    }

    /// All ids `0..n`.
    pub fn full(n: usize) -> Self {
        SensorSet((0..n).collect())
    }

    /// Ids whose bit is set in `mask`.
    pub fn from_mask(mask: u64) -> Self {
        SensorSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn with(&self, id: usize) -> Self {
        let mut ids = self.0.clone();
        if let Err(pos) = ids.binary_search(&id) {
            ids.insert(pos, id);
        }
        SensorSet(ids)
    }

    pub fn without(&self, id: usize) -> Self {
        SensorSet(self.0.iter().copied().filter(|&i| i != id).collect())
    }

    pub fn is_subset(&self, other: &SensorSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for SensorSet {
    /// Semicolon-joined ids, e.g. `0;2;5`. The empty set renders as an empty string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for SensorSet {
    type Err = Error;

    /// Accepts ids separated by `;` or `,`.
    fn from_str(s: &str) -> Result<Self> {
        let mut ids = Vec::new();
        for tok in s.split([';', ',']).map(str::trim).filter(|t| !t.is_empty()) {
            ids.push(
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad sensor id `{tok}`")))?,
            );
        }
        Ok(SensorSet::new(ids))
    }
}

impl FromIterator<usize> for SensorSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        SensorSet::new(iter)
    }
}

/// Discrete-time, time-varying linear system `x_{t+1} = A_t x_t + B_t u_t + w_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtvSystem {
    a: Vec<Mat>,
    b: Vec<Mat>,
    w: Vec<Mat>,
    sigma_init: Mat,
    x1_mean: Vector,
}

impl LtvSystem {
    pub fn new(a: Vec<Mat>, b: Vec<Mat>, w: Vec<Mat>, sigma_init: Mat, x1_mean: Vector) -> Result<Self> {
        let horizon = a.len();
        if horizon == 0 {
            return Err(Error::dim("A", None, "horizon must be positive"));
        }
        let n = sigma_init.nrows();
        if n == 0 {
            return Err(Error::dim("sigma_init", None, "state dimension must be positive"));
        }
        check_square("sigma_init", None, &sigma_init, n)?;
        check_psd("initial covariance", "sigma_init", None, &sigma_init)?;
        if x1_mean.len() != n {
            return Err(Error::dim("x1_mean", None, format!("expected {n} entries, got {}", x1_mean.len())));
        }
        if b.len() != horizon || w.len() != horizon {
            return Err(Error::dim(
                "B/W",
                None,
                format!("expected {horizon} steps, got B: {}, W: {}", b.len(), w.len()),
            ));
        }
        for k in 0..horizon {
            let t = Some(k + 1);
            check_square("A", t, &a[k], n)?;
            if b[k].nrows() != n || b[k].ncols() == 0 {
                return Err(Error::dim("B", t, format!("expected {n}×m with m ≥ 1, got {:?}", b[k].shape())));
            }
            check_square("W", t, &w[k], n)?;
            check_psd("process noise", "W", t, &w[k])?;
        }
        Ok(LtvSystem {
            a,
            b,
            w,
            sigma_init,
            x1_mean,
        })
    }

    pub fn horizon(&self) -> usize {
        self.a.len()
    }

    pub fn state_dim(&self) -> usize {
        self.sigma_init.nrows()
    }

    pub fn input_dim(&self, k: usize) -> usize {
        self.b[k].ncols()
    }

    pub fn a(&self, k: usize) -> &Mat {
        &self.a[k]
    }

    pub fn b(&self, k: usize) -> &Mat {
        &self.b[k]
    }

    pub fn w(&self, k: usize) -> &Mat {
        &self.w[k]
    }

    pub fn sigma_init(&self) -> &Mat {
        &self.sigma_init
    }

    pub fn x1_mean(&self) -> &Vector {
        &self.x1_mean
    }

    /// Copy of the system with every `W_t` multiplied by `alpha`.
    pub fn with_scaled_noise(&self, alpha: f64) -> Result<Self> {
        LtvSystem::new(
            self.a.clone(),
            self.b.clone(),
            self.w.iter().map(|w| w * alpha).collect(),
            self.sigma_init.clone(),
            self.x1_mean.clone(),
        )
    }
}

/// A single sensor: `y_{i,t} = C_{i,t} x_t + v_{i,t}`, `v ~ N(0, V_{i,t})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sensor {
    pub id: usize,
    pub c: Vec<Mat>,
    pub v: Vec<Mat>,
    pub cost: f64,
    pub label: Option<String>,
}

impl Sensor {
    pub fn time_invariant(id: usize, c: Mat, v: Mat, cost: f64, horizon: usize) -> Self {
        Sensor {
            id,
            c: vec![c; horizon],
            v: vec![v; horizon],
            cost,
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn measurement_dim(&self) -> usize {
        self.c[0].nrows()
    }
}

/// The ground set of candidate sensors, ordered by id.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSuite {
    sensors: Vec<Sensor>,
}

impl SensorSuite {
    pub fn new(mut sensors: Vec<Sensor>, horizon: usize, state_dim: usize) -> Result<Self> {
        sensors.sort_by_key(|s| s.id);
        for (expected, s) in sensors.iter().enumerate() {
            if s.id != expected {
                return Err(Error::SensorIds(format!("expected id {expected}, found {}", s.id)));
            }
        }
        for s in &sensors {
            let field = format!("sensors[{}]", s.id);
            if s.c.len() != horizon || s.v.len() != horizon {
                return Err(Error::dim(
                    &field,
                    None,
                    format!("expected {horizon} steps, got C: {}, V: {}", s.c.len(), s.v.len()),
                ));
            }
            if !(s.cost.is_finite() && s.cost >= 0.0) {
                return Err(Error::InvalidArgument(format!("{field}.cost must be a nonnegative number")));
            }
            let p = s.c[0].nrows();
            if p == 0 {
                return Err(Error::dim(format!("{field}.C"), Some(1), "measurement dimension must be positive"));
            }
            for k in 0..horizon {
                let t = Some(k + 1);
                if s.c[k].shape() != (p, state_dim) {
                    return Err(Error::dim(
                        format!("{field}.C"),
                        t,
                        format!("expected {p}×{state_dim}, got {:?}", s.c[k].shape()),
                    ));
                }
                check_square(&format!("{field}.V"), t, &s.v[k], p)?;
                check_symmetric(&format!("{field}.V"), t, &s.v[k])?;
                let lmin = linalg::min_eigenvalue(&s.v[k]);
                if !(lmin > PD_TOL) {
                    return Err(Error::Indefinite {
                        what: "sensor noise",
                        kind: "definite",
                        field: format!("{field}.V"),
                        t,
                        min_eigenvalue: lmin,
                    });
                }
            }
        }
        Ok(SensorSuite { sensors })
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn sensors(&self) -> &[Sensor] {
        &self.sensors
    }

    pub fn sensor(&self, id: usize) -> Result<&Sensor> {
        self.sensors.get(id).ok_or(Error::UnknownSensor(id))
    }

    pub fn ground_set(&self) -> SensorSet {
        SensorSet::full(self.sensors.len())
    }

    pub fn cost(&self, id: usize) -> f64 {
        self.sensors[id].cost
    }

    pub fn total_cost(&self) -> f64 {
        self.sensors.iter().map(|s| s.cost).sum()
    }

    pub fn check_members(&self, set: &SensorSet) -> Result<()> {
        match set.iter().find(|&i| i >= self.sensors.len()) {
            Some(bad) => Err(Error::UnknownSensor(bad)),
            None => Ok(()),
        }
    }

    /// Ids of sensors whose label starts with `prefix`.
    pub fn labeled_with(&self, prefix: &str) -> SensorSet {
        self.sensors
            .iter()
            .filter(|s| s.label.as_deref().is_some_and(|l| l.starts_with(prefix)))
            .map(|s| s.id)
            .collect()
    }
}

/// Row-stacked `C_t(S)` and block-diagonal `V_t(S)` for the sensors in `set`
/// (ascending id order). The empty set yields `0×n` and `0×0` matrices.
pub fn stack_sensors(suite: &SensorSuite, set: &SensorSet, k: usize) -> Result<(Mat, Mat)> {
    suite.check_members(set)?;
    let n = suite.sensors.first().map(|s| s.c[0].ncols());
    let rows: usize = set.iter().map(|i| suite.sensors[i].measurement_dim()).sum();
    let n = n.unwrap_or(0);
    let mut c = Mat::zeros(rows, n);
    let mut blocks = Vec::with_capacity(set.len());
    let mut r = 0;
    for i in set.iter() {
        let s = &suite.sensors[i];
        c.view_mut((r, 0), (s.measurement_dim(), n)).copy_from(&s.c[k]);
        r += s.measurement_dim();
        blocks.push(s.v[k].clone());
    }
    Ok((c, linalg::block_diag(&blocks)))
}

/// Sum of the activation costs of the sensors in `set`.
pub fn set_cost(suite: &SensorSuite, set: &SensorSet) -> Result<f64> {
    suite.check_members(set)?;
    Ok(set.iter().map(|i| suite.sensors[i].cost).sum())
}

/// Quadratic cost weights `Q_t` (state) and `R_t` (input).
#[derive(Debug, Clone, PartialEq)]
pub struct LqgWeights {
    q: Vec<Mat>,
    r: Vec<Mat>,
}

impl LqgWeights {
    pub fn new(q: Vec<Mat>, r: Vec<Mat>) -> Result<Self> {
        if q.len() != r.len() {
            return Err(Error::dim("Q/R", None, format!("Q has {} steps, R has {}", q.len(), r.len())));
        }
        for k in 0..q.len() {
            let t = Some(k + 1);
            check_square("Q", t, &q[k], q[k].nrows())?;
            check_psd("state weight", "Q", t, &q[k])?;
            check_square("R", t, &r[k], r[k].nrows())?;
            check_symmetric("R", t, &r[k])?;
            let lmin = linalg::min_eigenvalue(&r[k]);
            if !(lmin > PD_TOL) {
                return Err(Error::Indefinite {
                    what: "input weight",
                    kind: "definite",
                    field: "R".into(),
                    t,
                    min_eigenvalue: lmin,
                });
            }
        }
        Ok(LqgWeights { q, r })
    }

    pub fn q(&self, k: usize) -> &Mat {
        &self.q[k]
    }

    pub fn r(&self, k: usize) -> &Mat {
        &self.r[k]
    }

    pub fn horizon(&self) -> usize {
        self.q.len()
    }
}

/// Everything needed to pose the sensing-constrained (budget) and
/// minimum-sensing (kappa) co-design problems.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub system: LtvSystem,
    pub suite: SensorSuite,
    pub weights: LqgWeights,
    pub budget: Option<f64>,
    pub kappa: Option<f64>,
}

impl Scenario {
    pub fn new(
        system: LtvSystem,
        suite: SensorSuite,
        weights: LqgWeights,
        budget: Option<f64>,
        kappa: Option<f64>,
    ) -> Result<Self> {
        let horizon = system.horizon();
        let n = system.state_dim();
        if weights.horizon() != horizon {
            return Err(Error::dim(
                "Q/R",
                None,
                format!("expected {horizon} steps, got {}", weights.horizon()),
            ));
        }
        for k in 0..horizon {
            let t = Some(k + 1);
            if weights.q[k].nrows() != n {
                return Err(Error::dim("Q", t, format!("expected {n}×{n}, got {:?}", weights.q[k].shape())));
            }
            let m = system.input_dim(k);
            if weights.r[k].nrows() != m {
                return Err(Error::dim("R", t, format!("expected {m}×{m} to match B, got {:?}", weights.r[k].shape())));
            }
        }
        for s in suite.sensors() {
            if s.c.len() != horizon || s.c.iter().any(|c| c.ncols() != n) {
                return Err(Error::dim(format!("sensors[{}].C", s.id), None, "does not match the system"));
            }
        }
        for (name, value) in [("budget", budget), ("kappa", kappa)] {
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidArgument(format!("{name} must be a nonnegative number")));
                }
            }
        }
        Ok(Scenario {
            system,
            suite,
            weights,
            budget,
            kappa,
        })
    }

    pub fn horizon(&self) -> usize {
        self.system.horizon()
    }

    pub fn state_dim(&self) -> usize {
        self.system.state_dim()
    }

    pub fn budget(&self) -> Result<f64> {
        self.budget.ok_or(Error::MissingParameter("budget"))
    }

    pub fn kappa(&self) -> Result<f64> {
        self.kappa.ok_or(Error::MissingParameter("kappa"))
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_scenario()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ScenarioFile::from_scenario(self))
            .expect("scenario serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Reads and validates a scenario JSON file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_json(&text)
}

fn check_square(field: &str, t: Option<usize>, m: &Mat, n: usize) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::dim(field, t, format!("expected {n}×{n}, got {:?}", m.shape())));
    }
    Ok(())
}

fn check_symmetric(field: &str, t: Option<usize>, m: &Mat) -> Result<()> {
    let asym = linalg::asymmetry(m);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            field: field.into(),
            t,
            asymmetry: asym,
        });
    }
    Ok(())
}

fn check_psd(what: &'static str, field: &str, t: Option<usize>, m: &Mat) -> Result<()> {
    check_symmetric(field, t, m)?;
    let lmin = linalg::min_eigenvalue(m);
    if !(lmin >= PSD_TOL) {
        return Err(Error::Indefinite {
            what,
            kind: "semidefinite",
            field: field.into(),
            t,
            min_eigenvalue: lmin,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON schema

type Rows = Vec<Vec<f64>>;

/// A matrix given once (broadcast over the horizon) or once per step.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum MatSeq {
    Single(Rows),
    PerStep(Vec<Rows>),
}

impl MatSeq {
    fn encode(seq: &[Mat]) -> Self {
        if seq.windows(2).all(|w| w[0] == w[1]) {
            MatSeq::Single(linalg::to_rows(&seq[0]))
        } else {
            MatSeq::PerStep(seq.iter().map(linalg::to_rows).collect())
        }
    }

    fn decode(self, field: &str, horizon: usize) -> Result<Vec<Mat>> {
        match self {
            MatSeq::Single(rows) => Ok(vec![rows_to_mat(field, None, &rows)?; horizon]),
            MatSeq::PerStep(steps) => {
                if steps.len() != horizon {
                    return Err(Error::dim(
                        field,
                        None,
                        format!("expected {horizon} per-step matrices, got {}", steps.len()),
                    ));
                }
                steps
                    .iter()
                    .enumerate()
                    .map(|(k, rows)| rows_to_mat(field, Some(k + 1), rows))
                    .collect()
            }
        }
    }
}

fn rows_to_mat(field: &str, t: Option<usize>, rows: &Rows) -> Result<Mat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::dim(field, t, "ragged matrix rows"));
    }
    Ok(Mat::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

#[derive(Debug, Serialize, Deserialize)]
struct SensorFile {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(rename = "C")]
    c: MatSeq,
    #[serde(rename = "V")]
    v: MatSeq,
    cost: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    horizon: usize,
    state_dim: usize,
    #[serde(rename = "A")]
    a: MatSeq,
    #[serde(rename = "B")]
    b: MatSeq,
    #[serde(rename = "W")]
    w: MatSeq,
    #[serde(rename = "Q")]
    q: MatSeq,
    #[serde(rename = "R")]
    r: MatSeq,
    sigma_init: Rows,
    #[serde(default)]
    x1_mean: Option<Vec<f64>>,
    sensors: Vec<SensorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario> {
        let horizon = self.horizon;
        let n = self.state_dim;
        if horizon == 0 {
            return Err(Error::dim("horizon", None, "must be positive"));
        }
        let sigma_init = rows_to_mat("sigma_init", None, &self.sigma_init)?;
        if sigma_init.nrows() != n {
            return Err(Error::dim(
                "sigma_init",
                None,
                format!("state_dim is {n} but sigma_init is {:?}", sigma_init.shape()),
            ));
        }
        let x1_mean = match self.x1_mean {
            Some(v) => Vector::from_vec(v),
            None => Vector::zeros(n),
        };
        let system = LtvSystem::new(
            self.a.decode("A", horizon)?,
            self.b.decode("B", horizon)?,
            self.w.decode("W", horizon)?,
            sigma_init,
            x1_mean,
        )?;
        let weights = LqgWeights::new(self.q.decode("Q", horizon)?, self.r.decode("R", horizon)?)?;
        let sensors = self
            .sensors
            .into_iter()
            .map(|s| {
                let field = format!("sensors[{}]", s.id);
                Ok(Sensor {
                    id: s.id,
                    c: s.c.decode(&format!("{field}.C"), horizon)?,
                    v: s.v.decode(&format!("{field}.V"), horizon)?,
                    cost: s.cost,
                    label: s.label,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let suite = SensorSuite::new(sensors, horizon, n)?;
        Scenario::new(system, suite, weights, self.budget, self.kappa)
    }

    fn from_scenario(sc: &Scenario) -> Self {
        let sys = &sc.system;
        ScenarioFile {
            horizon: sys.horizon(),
            state_dim: sys.state_dim(),
            a: MatSeq::encode(&sys.a),
            b: MatSeq::encode(&sys.b),
            w: MatSeq::encode(&sys.w),
            q: MatSeq::encode(&sc.weights.q),
            r: MatSeq::encode(&sc.weights.r),
            sigma_init: linalg::to_rows(&sys.sigma_init),
            x1_mean: Some(sys.x1_mean.iter().copied().collect()),
            sensors: sc
                .suite
                .sensors()
                .iter()
                .map(|s| SensorFile {
                    id: s.id,
                    label: s.label.clone(),
                    c: MatSeq::encode(&s.c),
                    v: MatSeq::encode(&s.v),
                    cost: s.cost,
                })
                .collect(),
            budget: sc.budget,
            kappa: sc.kappa,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALAR: &str = r#"{
        "horizon": 1, "state_dim": 1,
        "A": [[1]], "B": [[1]], "W": [[0]], "Q": [[1]], "R": [[1]],
        "sigma_init": [[1]],
        "sensors": [{"id": 0, "C": [[1]], "V": [[1]], "cost": 1}]
    }"#;

    fn two_scalar_suite() -> SensorSuite {
        let one = Mat::from_element(1, 1, 1.0);
        SensorSuite::new(
            vec![
                Sensor::time_invariant(0, one.clone(), one.clone(), 1.0, 1),
                Sensor::time_invariant(1, one.clone(), Mat::from_element(1, 1, 0.5), 2.0, 1),
                Sensor::time_invariant(2, one.clone() * 3.0, one, 4.0, 1),
            ],
            1,
            1,
        )
        .unwrap()
    }

    #[test]
    fn loads_scalar_scenario() {
        let sc = Scenario::from_json(SCALAR).unwrap();
        assert_eq!(sc.horizon(), 1);
        assert_eq!(sc.state_dim(), 1);
        assert_eq!(sc.suite.len(), 1);
        assert_eq!(sc.system.x1_mean()[0], 0.0);
        assert!(sc.budget.is_none());
    }

    #[test]
    fn rejects_singular_sensor_noise() {
        let text = SCALAR.replace(r#""V": [[1]]"#, r#""V": [[0]]"#);
        let err = Scenario::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("sensor noise not positive definite"), "{err}");
        assert!(err.to_string().contains("t = 1"), "{err}");
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(matches!(Scenario::from_json("{\"horizon\": 1,"), Err(Error::Parse(_))));
    }

    #[test]
    fn reports_dimension_mismatch_with_time_index() {
        let text = SCALAR.replace(r#""A": [[1]]"#, r#""A": [[[1]], [[1, 0]]]"#).replace(r#""horizon": 1"#, r#""horizon": 2"#);
        let err = Scenario::from_json(&text).unwrap_err();
        match err {
            Error::Dimension { field, t, .. } => {
                assert_eq!(field, "A");
                assert_eq!(t, Some(2));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_indefinite_process_noise() {
        let text = SCALAR.replace(r#""W": [[0]]"#, r#""W": [[-0.5]]"#);
        let err = Scenario::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::Indefinite { what: "process noise", .. }), "{err}");
    }

    #[test]
    fn rejects_non_contiguous_ids() {
        let text = SCALAR.replace(r#""id": 0"#, r#""id": 3"#);
        assert!(matches!(Scenario::from_json(&text), Err(Error::SensorIds(_))));
    }

    #[test]
    fn stacking_empty_set() {
        let suite = two_scalar_suite();
        let (c, v) = stack_sensors(&suite, &SensorSet::empty(), 0).unwrap();
        assert_eq!(c.shape(), (0, 1));
        assert_eq!(v.shape(), (0, 0));
    }

    #[test]
    fn stacking_two_scalars() {
        let suite = two_scalar_suite();
        let (c, v) = stack_sensors(&suite, &SensorSet::new([0, 1]), 0).unwrap();
        assert_eq!(c, Mat::from_row_slice(2, 1, &[1.0, 1.0]));
        assert_eq!(v, Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]));
    }

    #[test]
    fn stacking_orders_by_id() {
        let suite = two_scalar_suite();
        let (c, _) = stack_sensors(&suite, &SensorSet::new([2, 0]), 0).unwrap();
        assert_eq!(c, Mat::from_row_slice(2, 1, &[1.0, 3.0]));
    }

    #[test]
    fn stacking_unknown_id_fails() {
        let suite = two_scalar_suite();
        assert!(matches!(
            stack_sensors(&suite, &SensorSet::new([7]), 0),
            Err(Error::UnknownSensor(7))
        ));
    }

    #[test]
    fn set_costs() {
        let suite = two_scalar_suite();
        assert_eq!(set_cost(&suite, &SensorSet::empty()).unwrap(), 0.0);
        assert_eq!(set_cost(&suite, &SensorSet::new([0, 1])).unwrap(), 3.0);
    }

    #[test]
    fn sensor_set_parsing_and_display() {
        let s: SensorSet = "5;0,2".parse().unwrap();
        assert_eq!(s.ids(), &[0, 2, 5]);
        assert_eq!(s.to_string(), "0;2;5");
        assert_eq!(SensorSet::from_mask(s.to_mask()), s);
        assert!("1;x".parse::<SensorSet>().is_err());
    }
}
