//! Sensor-set search.
//!
//! * [`greedy_budget`]: cost-benefit greedy under a budget, compared against
//!   the best affordable singleton.
//! * [`greedy_mincost`]: cost-benefit greedy that stops as soon as the LQG
//!   bound is met.
//! * [`oracle_budget`] / [`oracle_mincost`]: exhaustive enumeration.
//! * [`baseline_logdet`], [`baseline_random`], [`baseline_all`]: comparison
//!   selections.
//!
//! Ties are always broken towards the smallest sensor id (or the
//! lexicographically smallest set).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kalman::CostModel;
use crate::model::SensorSet;

/// Default ground-set size limit for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;
/// Gains at or below this are treated as zero.
pub const ZERO_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GreedyBudget,
    GreedyMincost,
    OracleBudget,
    OracleMincost,
    Logdet,
    Random,
    All,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::GreedyBudget => "greedy_budget",
            Method::GreedyMincost => "greedy_mincost",
            Method::OracleBudget => "oracle_budget",
            Method::OracleMincost => "oracle_mincost",
            Method::Logdet => "logdet",
            Method::Random => "random",
            Method::All => "all",
        }
    }
}

/// One pass of the greedy loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyStep {
    pub added: usize,
    pub gain: f64,
    pub rate: f64,
    pub cumulative_cost: f64,
    /// Set when the step overflowed the budget and was undone.
    pub removed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub set: SensorSet,
    pub objective: f64,
}

/// The two candidates of the budgeted greedy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetCandidates {
    pub best_singleton: Candidate,
    pub greedy: Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub method: Method,
    pub chosen: SensorSet,
    pub objective_f: f64,
    pub lqg_cost_g: f64,
    pub cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<BudgetCandidates>,
    pub iterations: Vec<GreedyStep>,
    /// Last sensor added by the minimum-cost greedy (`s_l`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_added: Option<usize>,
    /// `Ŝ \ {s_l}` for the minimum-cost greedy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before_last: Option<SensorSet>,
    /// `g(Ŝ \ {s_l})`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before_last_g: Option<f64>,
}

impl SelectionReport {
    fn plain(model: &CostModel, method: Method, chosen: SensorSet) -> Result<Self> {
        Ok(SelectionReport {
            method,
            objective_f: model.f(&chosen)?,
            lqg_cost_g: model.g(&chosen)?,
            cost: model.set_cost(&chosen),
            chosen,
            candidates: None,
            iterations: Vec::new(),
            last_added: None,
            before_last: None,
            before_last_g: None,
        })
    }
}

/// Gain per unit cost. Free sensors with a positive gain rank above everything.
fn rate(gain: f64, cost: f64) -> f64 {
    if cost > 0.0 {
        gain / cost
    } else if gain > ZERO_GAIN {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Evaluates `objective(current ∪ {a})` for every remaining `a` (in
/// parallel) and returns the best `(a, gain, rate)`; ties go to the smaller id.
fn best_addition<F>(
    model: &CostModel,
    objective: &F,
    current: &SensorSet,
    current_value: f64,
    remaining: &[usize],
) -> Result<(usize, f64, f64)>
where
    F: Fn(&SensorSet) -> Result<f64> + Sync,
{
    let gains: Vec<(usize, f64)> = remaining
        .par_iter()
        .map(|&a| Ok((a, current_value - objective(&current.with(a))?)))
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, f64, f64)> = None;
    for (a, gain) in gains {
        let r = rate(gain, model.cost(a));
        match best {
            Some((_, _, br)) if !(r > br) => {}
            _ => best = Some((a, gain, r)),
        }
    }
    Ok(best.expect("remaining set is non-empty"))
}

struct BudgetedGreedy {
    chosen: SensorSet,
    candidates: BudgetCandidates,
    iterations: Vec<GreedyStep>,
}

/// The budgeted cost-benefit greedy over an arbitrary non-increasing objective.
fn budgeted_greedy<F>(model: &CostModel, budget: f64, objective: F) -> Result<BudgetedGreedy>
where
    F: Fn(&SensorSet) -> Result<f64> + Sync,
{
    let ground = model.ground_set();

    // Best affordable singleton.
    let mut best_single = Candidate {
        set: SensorSet::empty(),
        objective: objective(&SensorSet::empty())?,
    };
    let mut found = false;
    for i in ground.iter().filter(|&i| model.cost(i) <= budget) {
        let set = SensorSet::new([i]);
        let value = objective(&set)?;
        if !found || value < best_single.objective {
            best_single = Candidate { set, objective: value };
            found = true;
        }
    }

    let mut current = SensorSet::empty();
    let mut current_value = objective(&current)?;
    let mut cost = 0.0;
    let mut remaining: Vec<usize> = ground.iter().collect();
    let mut iterations = Vec::new();
    let mut last = None;
    while !remaining.is_empty() && cost <= budget {
        let (s, gain, r) = best_addition(model, &objective, &current, current_value, &remaining)?;
        current = current.with(s);
        current_value = objective(&current)?;
        cost += model.cost(s);
        remaining.retain(|&a| a != s);
        iterations.push(GreedyStep {
            added: s,
            gain,
            rate: r,
            cumulative_cost: cost,
            removed: false,
        });
        last = Some(s);
    }
    if cost > budget {
        let s = last.expect("cost is positive only after an addition");
        current = current.without(s);
        current_value = objective(&current)?;
        if let Some(step) = iterations.last_mut() {
            step.removed = true;
        }
    }
    let greedy = Candidate {
        set: current,
        objective: current_value,
    };
    let chosen = if greedy.objective <= best_single.objective {
        greedy.set.clone()
    } else {
        best_single.set.clone()
    };
    Ok(BudgetedGreedy {
        chosen,
        candidates: BudgetCandidates {
            best_singleton: best_single,
            greedy,
        },
        iterations,
    })
}

/// Greedy sensing design for the budget-constrained problem.
pub fn greedy_budget(model: &CostModel) -> Result<SelectionReport> {
    let budget = model.scenario().budget()?;
    let run = budgeted_greedy(model, budget, |s| model.f(s))?;
    Ok(SelectionReport {
        candidates: Some(run.candidates),
        iterations: run.iterations,
        ..SelectionReport::plain(model, Method::GreedyBudget, run.chosen)?
    })
}

/// Greedy sensing design for the minimum-sensing problem: add the best
/// gain-per-cost sensor until `f(Ŝ) ≤ κ̄`.
pub fn greedy_mincost(model: &CostModel) -> Result<SelectionReport> {
    let kappa_bar = model.kappa_bar()?;
    let mut current = SensorSet::empty();
    let mut current_value = model.f(&current)?;
    let mut cost = 0.0;
    let mut remaining: Vec<usize> = model.ground_set().iter().collect();
    let mut iterations = Vec::new();
    while !remaining.is_empty() && current_value > kappa_bar {
        let objective = |s: &SensorSet| model.f(s);
        let (s, gain, r) = best_addition(model, &objective, &current, current_value, &remaining)?;
        current = current.with(s);
        current_value = model.f(&current)?;
        cost += model.cost(s);
        remaining.retain(|&a| a != s);
        iterations.push(GreedyStep {
            added: s,
            gain,
            rate: r,
            cumulative_cost: cost,
            removed: false,
        });
    }
    if current_value > kappa_bar {
        return Err(Error::Infeasible {
            f_all: current_value,
            kappa_bar,
        });
    }
    let last_added = iterations.last().map(|s| s.added);
    let before_last = last_added.map(|s| current.without(s));
    let before_last_g = before_last.as_ref().map(|s| model.g(s)).transpose()?;
    Ok(SelectionReport {
        iterations,
        last_added,
        before_last,
        before_last_g,
        ..SelectionReport::plain(model, Method::GreedyMincost, current)?
    })
}

fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap || size >= 64 {
        return Err(Error::EnumerationCap { size, cap });
    }
    Ok(())
}

fn mask_cost(model: &CostModel, mask: u64, size: usize) -> f64 {
    (0..size).filter(|i| mask >> i & 1 == 1).map(|i| model.cost(i)).sum()
}

/// Lexicographic order on sorted id lists.
fn lex_less(a: &SensorSet, b: &SensorSet) -> bool {
    a.ids() < b.ids()
}

/// Exhaustive minimizer of `f` over all sets with `c(S) ≤ b`.
pub fn oracle_budget(model: &CostModel, cap: usize) -> Result<SelectionReport> {
    let budget = model.scenario().budget()?;
    let size = model.scenario().suite.len();
    check_cap(size, cap)?;
    let best = (0..1u64 << size)
        .into_par_iter()
        .filter(|&mask| mask_cost(model, mask, size) <= budget)
        .map(|mask| {
            let set = SensorSet::from_mask(mask);
            Ok::<_, Error>((model.f_uncached(&set)?, set))
        })
        .try_reduce_with(|a, b| {
            let b_wins = b.0 < a.0 || (b.0 == a.0 && lex_less(&b.1, &a.1));
            Ok(if b_wins { b } else { a })
        })
        .expect("the empty set is always feasible")?;
    SelectionReport::plain(model, Method::OracleBudget, best.1)
}

/// Exhaustive minimum-cost set with `f(S) ≤ κ̄`; ties prefer smaller `f`,
/// then the lexicographically smaller set.
pub fn oracle_mincost(model: &CostModel, cap: usize) -> Result<SelectionReport> {
    let kappa_bar = model.kappa_bar()?;
    let size = model.scenario().suite.len();
    check_cap(size, cap)?;
    let best = (0..1u64 << size)
        .into_par_iter()
        .map(|mask| {
            let set = SensorSet::from_mask(mask);
            let f = model.f_uncached(&set)?;
            Ok((f <= kappa_bar).then(|| (mask_cost(model, mask, size), f, set)))
        })
        .filter_map(|r: Result<Option<_>>| r.transpose())
        .try_reduce_with(|a, b| {
            let b_wins = b.0 < a.0 || (b.0 == a.0 && (b.1 < a.1 || (b.1 == a.1 && lex_less(&b.2, &a.2))));
            Ok(if b_wins { b } else { a })
        });
    match best {
        Some(best) => SelectionReport::plain(model, Method::OracleMincost, best?.2),
        None => Err(Error::Infeasible {
            f_all: model.f(&model.ground_set())?,
            kappa_bar,
        }),
    }
}

/// Estimation-only baseline: the budgeted greedy run on the average
/// log-determinant of the posterior covariance. Reports the LQG quantities
/// of the chosen set.
pub fn baseline_logdet(model: &CostModel) -> Result<SelectionReport> {
    let budget = model.scenario().budget()?;
    let run = budgeted_greedy(model, budget, |s| model.logdet(s))?;
    Ok(SelectionReport {
        candidates: Some(run.candidates),
        iterations: run.iterations,
        ..SelectionReport::plain(model, Method::Logdet, run.chosen)?
    })
}

/// Mandatory sensors plus uniformly random extra sensors while the budget allows.
///
/// The remaining sensors are visited in a seeded random order and each is
/// added if it still fits.
pub fn baseline_random(model: &CostModel, mandatory: &SensorSet, seed: u64) -> Result<SelectionReport> {
    let budget = model.scenario().budget()?;
    model.scenario().suite.check_members(mandatory)?;
    let mut cost = model.set_cost(mandatory);
    if cost > budget {
        return Err(Error::MandatoryOverBudget { cost, budget });
    }
    let mut rest: Vec<usize> = model.ground_set().iter().filter(|&i| !mandatory.contains(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rest.shuffle(&mut rng);
    let mut chosen = mandatory.clone();
    for i in rest {
        if cost + model.cost(i) <= budget {
            cost += model.cost(i);
            chosen = chosen.with(i);
        }
    }
    SelectionReport::plain(model, Method::Random, chosen)
}

/// Every available sensor.
pub fn baseline_all(model: &CostModel) -> Result<SelectionReport> {
    SelectionReport::plain(model, Method::All, model.ground_set())
}
