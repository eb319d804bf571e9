//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on invalid input or usage, 2 when the
//! minimum-sensing problem is infeasible.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, RatioReport};
use crate::error::{Error, Result};
use crate::kalman::CostModel;
use crate::model::{load_scenario, Scenario, SensorSet};
use crate::riccati::solve_riccati;
use crate::selection::{self, SelectionReport, DEFAULT_ENUMERATION_CAP};
use crate::simulate::{
    build_formation_scenario_with, build_uav_scenario_with, monte_carlo, CostMode, FormationConfig, FormationMode,
    MonteCarloSummary, UavConfig,
};

/// Prefix of the sensors the random baseline always keeps.
pub const MANDATORY_PREFIX: &str = "gps";

#[derive(Debug, Parser)]
#[command(name = "lqg-codesign", version, about = "Sensing-constrained LQG co-design")]
struct Cli {
    /// Output format for result rows.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads for the parallel searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// Minimize the LQG cost under a sensor budget.
    Budget,
    /// Minimize the sensor cost under an LQG cost bound.
    Mincost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Greedy,
    Oracle,
    Logdet,
    Random,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Benchmark {
    Formation,
    Uav,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a benchmark scenario file.
    Scenario {
        #[command(subcommand)]
        kind: ScenarioKind,
    },
    /// Dump the Riccati sequences as JSON.
    Riccati {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose a sensor set.
    Select {
        #[arg(value_enum)]
        problem: Problem,
        #[command(flatten)]
        common: SelectArgs,
        #[arg(long, value_enum, default_value = "greedy")]
        method: MethodArg,
        /// Monte Carlo runs for the empirical cost (0 skips simulation).
        #[arg(long, default_value_t = 0)]
        runs: usize,
    },
    /// Simulate the closed loop for a given or selected sensor set.
    Simulate {
        #[command(flatten)]
        common: SelectArgs,
        /// Semicolon- or comma-separated sensor ids.
        #[arg(long, conflicts_with = "method")]
        set: Option<String>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
    },
    /// Exact supermodularity ratio and its spectral lower bound (JSON).
    Ratio {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy selection with its a-posteriori certificate (JSON).
    Bound {
        #[arg(value_enum)]
        problem: Problem,
        #[command(flatten)]
        common: SelectArgs,
    },
    /// Grid over agents, horizons and budgets for every method (one table).
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
enum ScenarioKind {
    /// Planar multi-robot formation control.
    Formation {
        #[arg(long, default_value_t = 4)]
        agents: usize,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        #[arg(long, value_enum, default_value = "homogeneous")]
        mode: FormationMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Circumradius of the target polygon.
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// UAV navigation with GPS, altimeter and landmarks.
    Uav {
        #[arg(long, default_value_t = 5)]
        landmarks: usize,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        #[arg(long = "mode", value_enum, default_value = "uniform")]
        cost_mode: CostMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale of the random landmark covariance factor.
        #[arg(long, default_value_t = 0.5)]
        landmark_scale: f64,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario's budget.
    #[arg(long)]
    budget: Option<f64>,
    /// Overrides the scenario's LQG cost bound.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    scenario: Benchmark,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    agents: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    landmarks: usize,
    #[arg(long = "horizon", value_delimiter = ',', default_value = "20")]
    horizons: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    budgets: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Formation weighting or UAV cost mode.
    #[arg(long, default_value = "heterogeneous")]
    mode: String,
    /// Largest ground set for which the exhaustive optimum is included.
    #[arg(long, default_value_t = 12)]
    oracle_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario_id: String,
    pub method: String,
    pub horizon: usize,
    pub budget_or_kappa: f64,
    pub selected_set: String,
    pub set_cost: f64,
    pub objective_f: f64,
    pub analytical_g: f64,
    pub empirical_mean: Option<f64>,
    pub empirical_stderr: Option<f64>,
    pub runs: Option<usize>,
    pub gamma_exact: Option<f64>,
    pub gamma_bound: Option<f64>,
    pub cert_lhs: Option<f64>,
    pub cert_rhs: Option<f64>,
    pub cert_pass: Option<bool>,
}

pub const RESULT_COLUMNS: [&str; 16] = [
    "scenario_id",
    "method",
    "horizon",
    "budget_or_kappa",
    "selected_set",
    "set_cost",
    "objective_f",
    "analytical_g",
    "empirical_mean",
    "empirical_stderr",
    "runs",
    "gamma_exact",
    "gamma_bound",
    "cert_lhs",
    "cert_rhs",
    "cert_pass",
];

/// Ratio and certificate fields of a greedy row.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Certification {
    pub gamma_exact: Option<f64>,
    pub gamma_bound: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub pass: Option<bool>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(threads) = cli.threads {
        // Fails only if a pool already exists, which then keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match run(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Infeasible { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Scenario { kind } => build_scenario(kind),
        Command::Riccati { scenario, out } => {
            let sc = load_scenario(scenario)?;
            let sol = solve_riccati(&sc.system, &sc.weights)?;
            emit(out.as_deref(), &sol.to_json())
        }
        Command::Select {
            problem,
            common,
            method,
            runs,
        } => {
            let sc = load_with_overrides(common)?;
            let sol = solve_riccati(&sc.system, &sc.weights)?;
            let model = CostModel::new(&sc, &sol);
            let id = scenario_id(&common.scenario);
            let row = method_row(&model, &id, *problem, *method, common.seed, *runs, common.seed)?;
            emit(common.out.as_deref(), &render(cli.format, &[row])?)
        }
        Command::Simulate {
            common,
            set,
            method,
            runs,
        } => {
            let sc = load_with_overrides(common)?;
            let sol = solve_riccati(&sc.system, &sc.weights)?;
            let model = CostModel::new(&sc, &sol);
            let id = scenario_id(&common.scenario);
            let problem = if common.kappa.is_some() {
                Problem::Mincost
            } else {
                Problem::Budget
            };
            let row = match (set, method) {
                (Some(text), _) => {
                    let chosen: SensorSet = text
                        .parse()
                        .map_err(|e| Error::InvalidArgument(format!("--set: {e}")))?;
                    sc.suite.check_members(&chosen)?;
                    let mc = monte_carlo(&sc, &sol, &chosen, (*runs).max(1), common.seed, "set")?;
                    let mut row = base_row(&model, &id, "set", problem_value(&sc, problem), &chosen)?;
                    fill_empirical(&mut row, &mc);
                    row
                }
                (None, Some(m)) => method_row(&model, &id, problem, *m, common.seed, (*runs).max(1), common.seed)?,
                (None, None) => return Err(Error::InvalidArgument("give --set or --method".into())),
            };
            emit(common.out.as_deref(), &render(cli.format, &[row])?)
        }
        Command::Ratio { scenario, out } => {
            let sc = load_scenario(scenario)?;
            let sol = solve_riccati(&sc.system, &sc.weights)?;
            let model = CostModel::new(&sc, &sol);
            let report = analysis::ratio_report(&model)?;
            emit(out.as_deref(), &to_json(&report))
        }
        Command::Bound { problem, common } => {
            let sc = load_with_overrides(common)?;
            let sol = solve_riccati(&sc.system, &sc.weights)?;
            let model = CostModel::new(&sc, &sol);
            let report = run_method(&model, *problem, MethodArg::Greedy, common.seed)?;
            let ratio = analysis::ratio_report(&model)?;
            let cert = certify(&model, *problem, &report, &ratio)?;
            #[derive(Serialize)]
            struct BoundRecord<'a> {
                problem: &'static str,
                selection: &'a SelectionReport,
                ratio: &'a RatioReport,
                certificate: &'a Certification,
            }
            let record = BoundRecord {
                problem: match problem {
                    Problem::Budget => "budget",
                    Problem::Mincost => "mincost",
                },
                selection: &report,
                ratio: &ratio,
                certificate: &cert,
            };
            emit(common.out.as_deref(), &to_json(&record))
        }
        Command::Sweep(args) => {
            let rows = sweep(args)?;
            emit(args.out.as_deref(), &render(cli.format, &rows)?)
        }
    }
}

fn build_scenario(kind: &ScenarioKind) -> Result<()> {
    let (sc, out) = match kind {
        ScenarioKind::Formation {
            agents,
            horizon,
            mode,
            seed,
            radius,
            budget,
            kappa,
            out,
        } => {
            check_positive("--horizon", *horizon)?;
            if *agents < 2 {
                return Err(Error::InvalidArgument("--agents must be at least 2".into()));
            }
            let config = FormationConfig {
                radius: *radius,
                ..FormationConfig::default()
            };
            let mut sc = build_formation_scenario_with(*agents, *horizon, *mode, *seed, &config);
            sc.budget = *budget;
            sc.kappa = *kappa;
            (sc, out)
        }
        ScenarioKind::Uav {
            landmarks,
            horizon,
            cost_mode,
            seed,
            landmark_scale,
            budget,
            kappa,
            out,
        } => {
            check_positive("--horizon", *horizon)?;
            check_positive("--landmarks", *landmarks)?;
            let config = UavConfig {
                landmark_scale: *landmark_scale,
            };
            let mut sc = build_uav_scenario_with(*landmarks, *horizon, *cost_mode, *seed, &config);
            sc.budget = *budget;
            sc.kappa = *kappa;
            (sc, out)
        }
    };
    emit(out.as_deref(), &sc.to_json())
}

fn check_positive(flag: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::InvalidArgument(format!("{flag} must be positive")));
    }
    Ok(())
}

fn check_bound(flag: &str, value: Option<f64>) -> Result<Option<f64>> {
    match value {
        Some(v) if !(v >= 0.0 && v.is_finite()) => {
            Err(Error::InvalidArgument(format!("{flag} must be a nonnegative number")))
        }
        _ => Ok(value),
    }
}

fn load_with_overrides(args: &SelectArgs) -> Result<Scenario> {
    let mut sc = load_scenario(&args.scenario)?;
    if let Some(b) = check_bound("--budget", args.budget)? {
        sc.budget = Some(b);
    }
    if let Some(k) = check_bound("--kappa", args.kappa)? {
        sc.kappa = Some(k);
    }
    Ok(sc)
}

fn scenario_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn problem_value(sc: &Scenario, problem: Problem) -> f64 {
    match problem {
        Problem::Budget => sc.budget.unwrap_or(f64::NAN),
        Problem::Mincost => sc.kappa.unwrap_or(f64::NAN),
    }
}

fn run_method(model: &CostModel, problem: Problem, method: MethodArg, seed: u64) -> Result<SelectionReport> {
    match (problem, method) {
        (Problem::Budget, MethodArg::Greedy) => selection::greedy_budget(model),
        (Problem::Budget, MethodArg::Oracle) => selection::oracle_budget(model, DEFAULT_ENUMERATION_CAP),
        (Problem::Budget, MethodArg::Logdet) => selection::baseline_logdet(model),
        (Problem::Budget, MethodArg::Random) => {
            let mandatory = model.scenario().suite.labeled_with(MANDATORY_PREFIX);
            selection::baseline_random(model, &mandatory, seed)
        }
        (_, MethodArg::All) => selection::baseline_all(model),
        (Problem::Mincost, MethodArg::Greedy) => selection::greedy_mincost(model),
        (Problem::Mincost, MethodArg::Oracle) => selection::oracle_mincost(model, DEFAULT_ENUMERATION_CAP),
        (Problem::Mincost, m) => Err(Error::InvalidArgument(format!(
            "method `{}` applies only to the budget problem",
            m.to_possible_value().expect("no skipped variants").get_name()
        ))),
    }
}

/// Ratio, optimum and certificate for a greedy selection. The exact ratio is
/// preferred; the spectral bound stands in when it is valid and the exact
/// ratio is out of reach. The optimum comes from enumeration when the ground
/// set allows it.
pub fn certify(
    model: &CostModel,
    problem: Problem,
    report: &SelectionReport,
    ratio: &RatioReport,
) -> Result<Certification> {
    let gamma_bound = ratio.lower_bound.filter(|_| ratio.bound_valid);
    let mut cert = Certification {
        gamma_exact: ratio.exact_gamma,
        gamma_bound,
        ..Certification::default()
    };
    let Some(gamma) = ratio.exact_gamma.or(gamma_bound) else {
        return Ok(cert);
    };
    let enumerable = model.ground_set().len() <= DEFAULT_ENUMERATION_CAP;
    let g_empty = model.g(&SensorSet::empty())?;
    match problem {
        Problem::Budget => {
            let g_star = if enumerable {
                Some(selection::oracle_budget(model, DEFAULT_ENUMERATION_CAP)?.lqg_cost_g)
            } else {
                None
            };
            let c = analysis::budget_certificate(report, gamma, g_empty, g_star, model.scenario().budget()?);
            cert.lhs = c.lhs;
            cert.rhs = Some(c.rhs);
            cert.pass = c.pass();
        }
        Problem::Mincost => {
            let b_star = if enumerable {
                Some(selection::oracle_mincost(model, DEFAULT_ENUMERATION_CAP)?.cost)
            } else {
                None
            };
            let c = analysis::mincost_certificate(report, gamma, g_empty, model.scenario().kappa()?, b_star);
            cert.lhs = Some(c.cost);
            cert.rhs = c.rhs;
            cert.pass = c.pass();
        }
    }
    Ok(cert)
}

fn base_row(model: &CostModel, id: &str, method: &str, value: f64, chosen: &SensorSet) -> Result<ResultRow> {
    Ok(ResultRow {
        scenario_id: id.to_string(),
        method: method.to_string(),
        horizon: model.scenario().horizon(),
        budget_or_kappa: value,
        selected_set: chosen.to_string(),
        set_cost: model.set_cost(chosen),
        objective_f: model.f(chosen)?,
        analytical_g: model.g(chosen)?,
        empirical_mean: None,
        empirical_stderr: None,
        runs: None,
        gamma_exact: None,
        gamma_bound: None,
        cert_lhs: None,
        cert_rhs: None,
        cert_pass: None,
    })
}

fn fill_empirical(row: &mut ResultRow, mc: &MonteCarloSummary) {
    row.empirical_mean = Some(mc.mean_cost);
    row.empirical_stderr = Some(mc.std_error);
    row.runs = Some(mc.run_count);
}

/// Runs one method and assembles its row; greedy rows carry the certificate.
fn method_row(
    model: &CostModel,
    id: &str,
    problem: Problem,
    method: MethodArg,
    seed: u64,
    runs: usize,
    mc_seed: u64,
) -> Result<ResultRow> {
    let report = run_method(model, problem, method, seed)?;
    let sc = model.scenario();
    let mut row = base_row(model, id, report.method.name(), problem_value(sc, problem), &report.chosen)?;
    if method == MethodArg::Greedy {
        let ratio = analysis::ratio_report(model)?;
        let cert = certify(model, problem, &report, &ratio)?;
        row.gamma_exact = cert.gamma_exact;
        row.gamma_bound = cert.gamma_bound;
        row.cert_lhs = cert.lhs;
        row.cert_rhs = cert.rhs;
        row.cert_pass = cert.pass;
    }
    if runs > 0 {
        let mc = monte_carlo(sc, model.riccati(), &report.chosen, runs, mc_seed, report.method.name())?;
        fill_empirical(&mut row, &mc);
    }
    Ok(row)
}

fn sweep(args: &SweepArgs) -> Result<Vec<ResultRow>> {
    if args.runs == 0 {
        return Err(Error::InvalidArgument("--runs must be at least 1".into()));
    }
    for &h in &args.horizons {
        check_positive("--horizon", h)?;
    }
    for &b in &args.budgets {
        check_bound("--budgets", Some(b))?;
    }
    let mut rows = Vec::new();
    let sizes: Vec<usize> = match args.scenario {
        Benchmark::Formation => args.agents.clone(),
        Benchmark::Uav => vec![args.landmarks],
    };
    for &size in &sizes {
        for &horizon in &args.horizons {
            let (base, id) = match args.scenario {
                Benchmark::Formation => {
                    if size < 2 {
                        return Err(Error::InvalidArgument("--agents must be at least 2".into()));
                    }
                    let mode = FormationMode::from_str(&args.mode, true).map_err(Error::InvalidArgument)?;
                    let sc = build_formation_scenario_with(size, horizon, mode, args.seed, &FormationConfig::default());
                    (sc, format!("formation_a{size}_T{horizon}_s{}", args.seed))
                }
                Benchmark::Uav => {
                    check_positive("--landmarks", size)?;
                    let mode = CostMode::from_str(&args.mode, true).map_err(Error::InvalidArgument)?;
                    let sc = build_uav_scenario_with(size, horizon, mode, args.seed, &UavConfig::default());
                    (sc, format!("uav_l{size}_T{horizon}_s{}", args.seed))
                }
            };
            let sol = solve_riccati(&base.system, &base.weights)?;
            for &budget in &args.budgets {
                let sc = base.clone().with_budget(budget);
                let model = CostModel::new(&sc, &sol);
                let mut methods = vec![MethodArg::Greedy];
                if sc.suite.len() <= args.oracle_max {
                    methods.push(MethodArg::Oracle);
                }
                methods.extend([MethodArg::Logdet, MethodArg::Random, MethodArg::All]);
                for method in methods {
                    rows.push(method_row(&model, &id, Problem::Budget, method, args.seed, args.runs, args.seed)?);
                }
            }
        }
    }
    Ok(rows)
}

/// Rows as CSV (fixed columns, empty for absent values) or a JSON array.
pub fn render_rows(rows: &[ResultRow], json: bool) -> Result<String> {
    render(if json { Format::Json } else { Format::Csv }, rows)
}

fn render(format: Format, rows: &[ResultRow]) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(&rows)),
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
            writer.write_record(RESULT_COLUMNS).map_err(io)?;
            for row in rows {
                writer.serialize(row).map_err(io)?;
            }
            let bytes = writer.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable record");
    text.push('\n');
    text
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
