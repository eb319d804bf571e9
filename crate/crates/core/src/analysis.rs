//! Supermodularity ratio of the sensing objective and the a-posteriori
//! certificates for the two greedy algorithms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kalman::CostModel;
use crate::linalg::{self, Mat};
use crate::model::SensorSet;
use crate::riccati::DEFINITE_TOL;
use crate::selection::SelectionReport;

/// Largest ground set for the exhaustive ratio search.
pub const RATIO_CAP: usize = 8;
/// Marginals below this are treated as zero.
pub const MARGINAL_TOL: f64 = 1e-12;
/// Slack allowed in certificate comparisons.
pub const CERT_TOL: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub a: SensorSet,
    pub b: SensorSet,
    pub x: usize,
}

/// Hypotheses under which the computable lower bound is guaranteed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Applicability {
    pub theta_sum_positive_definite: bool,
    pub unit_trace_whitened: bool,
    pub trace_condition: bool,
}

impl Applicability {
    pub fn all(&self) -> bool {
        self.theta_sum_positive_definite && self.unit_trace_whitened && self.trace_condition
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub exact_gamma: Option<f64>,
    pub witness: Option<Witness>,
    pub lower_bound: Option<f64>,
    pub bound_valid: bool,
    pub applicability: Option<Applicability>,
}

impl RatioReport {
    fn empty() -> Self {
        RatioReport {
            exact_gamma: None,
            witness: None,
            lower_bound: None,
            bound_valid: false,
            applicability: None,
        }
    }
}

/// `f` on every subset, indexed by bitmask.
fn subset_table(model: &CostModel) -> Result<Vec<f64>> {
    let size = model.ground_set().len();
    (0..1u64 << size)
        .into_par_iter()
        .map(|mask| model.f_uncached(&SensorSet::from_mask(mask)))
        .collect()
}

/// Smallest ratio over all `(A ⊆ B, x ∉ B)` and the triple attaining it.
fn min_ratio(table: &[f64], size: usize) -> Option<(f64, u64, u64, usize)> {
    let full = (1u64 << size) - 1;
    let per_b: Vec<Option<(f64, u64, u64, usize)>> = (0..=full)
        .into_par_iter()
        .map(|b| {
            let mut best: Option<(f64, u64, u64, usize)> = None;
            for x in (0..size).filter(|&x| b & (1 << x) == 0) {
                let den = table[b as usize] - table[(b | 1 << x) as usize];
                // Submasks of b in decreasing order, ending with the empty set.
                let mut a = b;
                loop {
                    let num = table[a as usize] - table[(a | 1 << x) as usize];
                    let ratio = if den < MARGINAL_TOL {
                        None
                    } else if num < MARGINAL_TOL {
                        Some(0.0)
                    } else {
                        Some(num / den)
                    };
                    if let Some(r) = ratio {
                        if best.is_none_or(|(br, ..)| r < br) {
                            best = Some((r, a, b, x));
                        }
                    }
                    if a == 0 {
                        break;
                    }
                    a = (a - 1) & b;
                }
            }
            best
        })
        .collect();
    per_b.into_iter().flatten().fold(None, |acc, cand| match acc {
        Some(best) if !(cand.0 < best.0) => Some(best),
        _ => Some(cand),
    })
}

/// Exact supermodularity ratio of `f` by exhaustive search over `(A ⊆ B, x)`.
///
/// When every triple is skipped the ratio is 1 and no witness is reported.
pub fn exact_supermodularity_ratio(model: &CostModel) -> Result<RatioReport> {
    let size = model.ground_set().len();
    if size > RATIO_CAP {
        return Err(Error::EnumerationCap { size, cap: RATIO_CAP });
    }
    let table = subset_table(model)?;
    let mut report = RatioReport::empty();
    match min_ratio(&table, size) {
        Some((r, a, b, x)) => {
            report.exact_gamma = Some(r.clamp(0.0, 1.0));
            report.witness = Some(Witness {
                a: SensorSet::from_mask(a),
                b: SensorSet::from_mask(b),
                x,
            });
        }
        None => report.exact_gamma = Some(1.0),
    }
    Ok(report)
}

/// The spectral lower bound on the ratio with its applicability flags.
pub fn ratio_lower_bound(model: &CostModel) -> Result<RatioReport> {
    let sol = model.riccati();
    let ground = model.ground_set();
    let none = model.trajectory(&SensorSet::empty())?;
    let all = model.trajectory(&ground)?;

    let (th_min, th_max) = linalg::eigen_extremes(&sol.theta_sum());
    let theta_factor = if th_max > 0.0 { th_min / th_max } else { 0.0 };

    let mut min_all = f64::INFINITY;
    let mut max_none = 0.0_f64;
    let mut trace_condition = true;
    for (p_all, p_none) in all.posterior.iter().zip(&none.posterior) {
        min_all = min_all.min(linalg::min_eigenvalue(p_all).powi(2));
        let hi = linalg::max_eigenvalue(p_none);
        max_none = max_none.max(hi * hi);
        if p_none.trace() > hi * hi + NORMALIZATION_TOL {
            trace_condition = false;
        }
    }
    let covariance_factor = if max_none > 0.0 { min_all / max_none } else { 0.0 };

    let mut min_sensed = f64::INFINITY;
    let mut max_unsensed = 0.0_f64;
    let mut unit_trace = true;
    for w in model.whitened() {
        for (k, c_bar) in w.c_bar.iter().enumerate() {
            let project = |p: &Mat| c_bar * p * c_bar.transpose();
            min_sensed = min_sensed.min(linalg::min_eigenvalue(&project(&all.posterior[k])));
            max_unsensed = max_unsensed.max(linalg::max_eigenvalue(&project(&none.posterior[k])));
            if ((c_bar * c_bar.transpose()).trace() - 1.0).abs() > NORMALIZATION_TOL {
                unit_trace = false;
            }
        }
    }
    if !min_sensed.is_finite() {
        min_sensed = 0.0;
    }
    let sensing_factor = (1.0 + min_sensed) / (2.0 + max_unsensed);

    let applicability = Applicability {
        theta_sum_positive_definite: th_min > DEFINITE_TOL,
        unit_trace_whitened: unit_trace,
        trace_condition,
    };
    Ok(RatioReport {
        lower_bound: Some(theta_factor * covariance_factor * sensing_factor),
        bound_valid: applicability.all(),
        applicability: Some(applicability),
        ..RatioReport::empty()
    })
}

/// Both quantities; the exact ratio is absent above [`RATIO_CAP`].
pub fn ratio_report(model: &CostModel) -> Result<RatioReport> {
    let mut report = ratio_lower_bound(model)?;
    if model.ground_set().len() <= RATIO_CAP {
        let exact = exact_supermodularity_ratio(model)?;
        report.exact_gamma = exact.exact_gamma;
        report.witness = exact.witness;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Pass,
    Fail,
    Undefined,
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetCertificate {
    pub gamma: f64,
    pub lhs: Option<f64>,
    pub rhs: f64,
    pub status: CertificateStatus,
}

impl BudgetCertificate {
    pub fn pass(&self) -> Option<bool> {
        match self.status {
            CertificateStatus::Pass | CertificateStatus::Trivial => Some(true),
            CertificateStatus::Fail => Some(false),
            CertificateStatus::Undefined => None,
        }
    }
}

/// `max[γ/2·(1 − e^{−γ}), 1 − e^{−γ·c/b}]`, with `c/b = 0` for `b = 0`.
pub fn budget_bound(gamma: f64, cost: f64, budget: f64) -> f64 {
    let fraction = if budget > 0.0 { cost / budget } else { 0.0 };
    let first = gamma / 2.0 * (1.0 - (-gamma).exp());
    let second = 1.0 - (-gamma * fraction).exp();
    first.max(second)
}

/// Approximation certificate for the budget-constrained greedy.
///
/// `g_star` is the optimal value, when known.
pub fn budget_certificate(
    report: &SelectionReport,
    gamma: f64,
    g_empty: f64,
    g_star: Option<f64>,
    budget: f64,
) -> BudgetCertificate {
    let rhs = budget_bound(gamma, report.cost, budget);
    let lhs = g_star.map(|g_star| {
        let den = g_empty - g_star;
        if den.abs() <= MARGINAL_TOL {
            1.0
        } else {
            (g_empty - report.lqg_cost_g) / den
        }
    });
    let status = match lhs {
        None => CertificateStatus::Undefined,
        Some(l) if l >= rhs - CERT_TOL => CertificateStatus::Pass,
        Some(_) => CertificateStatus::Fail,
    };
    BudgetCertificate { gamma, lhs, rhs, status }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MincostCertificate {
    pub gamma: f64,
    pub cost: f64,
    /// Upper bound on the chosen cost, when defined.
    pub rhs: Option<f64>,
    /// `g(Ŝ) ≤ κ`.
    pub meets_kappa: bool,
    pub status: CertificateStatus,
}

impl MincostCertificate {
    pub fn pass(&self) -> Option<bool> {
        match self.status {
            CertificateStatus::Pass | CertificateStatus::Trivial => Some(true),
            CertificateStatus::Fail => Some(false),
            CertificateStatus::Undefined => None,
        }
    }
}

/// Cost certificate for the minimum-cost greedy. `b_star` is the optimal
/// cost, when known.
pub fn mincost_certificate(
    report: &SelectionReport,
    gamma: f64,
    g_empty: f64,
    kappa: f64,
    b_star: Option<f64>,
) -> MincostCertificate {
    let meets_kappa = report.lqg_cost_g <= kappa + CERT_TOL;
    let mut cert = MincostCertificate {
        gamma,
        cost: report.cost,
        rhs: None,
        meets_kappa,
        status: CertificateStatus::Undefined,
    };
    let (Some(last), Some(g_prev)) = (report.last_added, report.before_last_g) else {
        cert.status = if meets_kappa {
            CertificateStatus::Trivial
        } else {
            CertificateStatus::Fail
        };
        return cert;
    };
    let (Some(b_star), true) = (b_star, gamma > 0.0) else {
        return cert;
    };
    let ratio = (g_empty - kappa) / (g_prev - kappa);
    if !(g_prev - kappa > 0.0) || !(ratio > 0.0) {
        return cert;
    }
    let last_cost = cost_of_last(report, last);
    let rhs = last_cost + ratio.ln() / gamma * b_star;
    cert.rhs = Some(rhs);
    cert.status = if report.cost <= rhs + CERT_TOL && meets_kappa {
        CertificateStatus::Pass
    } else {
        CertificateStatus::Fail
    };
    cert
}

/// `c(s_l)` recovered from the cumulative costs of the greedy trace.
fn cost_of_last(report: &SelectionReport, last: usize) -> f64 {
    let steps = &report.iterations;
    match steps.iter().position(|s| s.added == last) {
        Some(0) => steps[0].cumulative_cost,
        Some(i) => steps[i].cumulative_cost - steps[i - 1].cumulative_cost,
        None => 0.0,
    }
}
