//! The `test` command: run a set of procedures on one dataset.

use randcompare_core::designs::{RngStream, DEFAULT_ENUMERATION_CAP};
use randcompare_core::experiment::Treatment;
use randcompare_core::procedures::{
    fisher_exact_2x2, fisher_randomization_test, fisher_selection_test, neyman_randomization_test,
    neyman_selection_test, permutation_test, pooled_t_test, welch_t_test, wilcoxon_test,
    PValueEngine, TestKind, TestReport,
};
use randcompare_core::stats::mean;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::design::DesignSpec;
use crate::error::{core_exit_code, CliError};

/// Support size up to which the default engine enumerates.
pub const DEFAULT_EXACT_SUPPORT: u128 = 200_000;
/// Monte Carlo budget used when none is given.
pub const DEFAULT_MC_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Test(TestKind),
    FisherSelection,
}

impl Selector {
    pub fn name(self) -> &'static str {
        match self {
            Selector::Test(k) => k.name(),
            Selector::FisherSelection => "fisher-selection",
        }
    }
}

/// Parsed `--tests` value. `all` expands to every procedure applicable to
/// the data, with the inapplicable ones reported as notices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSelection {
    pub selectors: Vec<Selector>,
    pub all: bool,
}

impl TestSelection {
    pub fn parse(arg: &str) -> Result<Self, CliError> {
        if arg.trim() == "all" {
            let mut selectors: Vec<Selector> = TestKind::ALL.into_iter().map(Selector::Test).collect();
            selectors.push(Selector::FisherSelection);
            return Ok(Self { selectors, all: true });
        }
        let mut selectors = Vec::new();
        for name in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let sel = if name == "fisher-selection" {
                Selector::FisherSelection
            } else {
                Selector::Test(TestKind::from_name(name).ok_or_else(|| {
                    CliError::Usage(format!("unknown test `{name}`; known: {}, fisher-selection, all", known_tests()))
                })?)
            };
            if !selectors.contains(&sel) {
                selectors.push(sel);
            }
        }
        if selectors.is_empty() {
            return Err(CliError::Usage("no tests selected".into()));
        }
        Ok(Self { selectors, all: false })
    }
}

pub fn known_tests() -> String {
    TestKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Exact,
    MonteCarlo,
    Asymptotic,
}

/// `--engine` / `--mc` to a core engine:
///
/// - neither: exact up to 200,000 support points, else Monte Carlo with
///   10^6 draws;
/// - `--mc B` alone: Monte Carlo with `B` draws;
/// - `exact`: enumeration up to the core cap, otherwise an error.
pub fn resolve_engine(choice: Option<EngineChoice>, mc: Option<u64>, seed: u64) -> Result<PValueEngine, CliError> {
    let engine = match (choice, mc) {
        (None, None) => PValueEngine::exact_or_monte_carlo(DEFAULT_EXACT_SUPPORT, DEFAULT_MC_BUDGET, seed)?,
        (None | Some(EngineChoice::MonteCarlo), budget) => {
            PValueEngine::monte_carlo(budget.unwrap_or(DEFAULT_MC_BUDGET), seed)?
        }
        (Some(EngineChoice::Exact), None) => PValueEngine::Exact { cap: DEFAULT_ENUMERATION_CAP },
        (Some(EngineChoice::Asymptotic), None) => PValueEngine::Asymptotic,
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--mc only applies to the Monte Carlo engine".into()))
        }
    };
    Ok(engine)
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineSummary {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl EngineSummary {
    pub fn of(engine: PValueEngine) -> Self {
        let cap64 = |c: u128| u64::try_from(c).unwrap_or(u64::MAX);
        match engine {
            PValueEngine::Exact { cap } => Self { mode: "exact", cap: Some(cap64(cap)), budget: None, seed: None },
            PValueEngine::MonteCarlo { budget, seed } => {
                Self { mode: "monte_carlo", cap: None, budget: Some(budget), seed: Some(seed) }
            }
            PValueEngine::ExactOrMonteCarlo { cap, budget, seed } => Self {
                mode: "exact_or_monte_carlo",
                cap: Some(cap64(cap)),
                budget: Some(budget),
                seed: Some(seed),
            },
            PValueEngine::Asymptotic => Self { mode: "asymptotic", cap: None, budget: None, seed: None },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub mean1: f64,
    pub mean2: f64,
    pub difference: f64,
}

impl DatasetSummary {
    pub fn of(data: &Dataset) -> Self {
        let o = &data.observed;
        let (a, b) = (o.arm(Treatment::One), o.arm(Treatment::Two));
        let (mean1, mean2) = (mean(&a), mean(&b));
        Self { n: o.len(), n1: a.len(), n2: b.len(), mean1, mean2, difference: mean1 - mean2 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub test: &'static str,
    pub hypothesis: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub p_value_kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_draws: Option<u64>,
    pub assumptions: Vec<&'static str>,
    pub n1: usize,
    pub n2: usize,
    pub degenerate: bool,
    pub reject: bool,
}

impl ReportRecord {
    pub fn of(r: &TestReport, alpha: f64) -> Self {
        let mc_draws = match r.p_value_kind {
            randcompare_core::procedures::PValueKind::MonteCarlo { draws, .. } => Some(draws),
            _ => None,
        };
        Self {
            test: r.test.name(),
            hypothesis: r.hypothesis.tag(),
            statistic: r.statistic,
            p_value: r.p_value,
            p_value_kind: r.p_value_kind.tag(),
            mc_stderr: r.p_value_kind.stderr(),
            mc_draws,
            assumptions: r.assumptions.iter().map(|a| a.tag()).collect(),
            n1: r.n1,
            n2: r.n2,
            degenerate: r.degenerate,
            reject: r.rejects(alpha),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Notice {
    pub test: &'static str,
    pub error: String,
    pub exit_code: i32,
}

/// Everything `test` prints; a pure function of its inputs.
#[derive(Debug, Clone, Serialize)]
pub struct TestRun {
    pub dataset: DatasetSummary,
    pub design: &'static str,
    pub engine: EngineSummary,
    pub rng: &'static str,
    pub alpha: f64,
    /// Observed Horvitz-Thompson difference, when Fisher's randomization
    /// test ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d3: Option<f64>,
    /// Observed Neyman statistic, when Neyman's randomization test ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z3: Option<f64>,
    pub reports: Vec<ReportRecord>,
    pub notices: Vec<Notice>,
}

pub struct TestRequest<'a> {
    pub data: &'a Dataset,
    pub selection: &'a TestSelection,
    pub design: &'a DesignSpec,
    pub engine: PValueEngine,
    pub alpha: f64,
}

fn run_one(sel: Selector, req: &TestRequest<'_>) -> Result<TestReport, CliError> {
    let obs = &req.data.observed;
    let engine = req.engine;
    let report = match sel {
        Selector::Test(TestKind::Permutation) => permutation_test(obs, engine)?,
        Selector::Test(TestKind::Wilcoxon) => wilcoxon_test(obs, engine)?,
        Selector::Test(TestKind::WelchT) => welch_t_test(obs)?,
        Selector::Test(TestKind::PooledT) => pooled_t_test(obs)?,
        Selector::Test(TestKind::FisherRandomization) => {
            let design = req.design.assignment_design(obs.assignment())?;
            fisher_randomization_test(obs, &design, engine)?
        }
        Selector::Test(TestKind::NeymanRandomization) => {
            let design = req.design.assignment_design(obs.assignment())?;
            neyman_randomization_test(obs, &design)?
        }
        Selector::Test(TestKind::NeymanSelection) => {
            let design = req.design.selection_design(obs.assignment())?;
            neyman_selection_test(obs, &design)?
        }
        Selector::Test(TestKind::FisherExact2x2) => fisher_exact_2x2(obs)?,
        Selector::FisherSelection => {
            let design = req.design.selection_design(obs.assignment())?;
            fisher_selection_test(obs, &design)?
        }
    };
    Ok(report)
}

/// Run the selected procedures in selection order.
///
/// With `--tests all` a failing procedure becomes a notice and the rest
/// still run; with an explicit list the first failure is returned.
pub fn run_tests(req: &TestRequest<'_>) -> Result<TestRun, CliError> {
    let mut reports = Vec::new();
    let mut notices = Vec::new();
    let binary = req.data.observed.is_binary();
    for &sel in &req.selection.selectors {
        if req.selection.all && sel == Selector::Test(TestKind::FisherExact2x2) && !binary {
            continue;
        }
        match run_one(sel, req) {
            Ok(r) => reports.push(r),
            Err(e) if req.selection.all => notices.push(Notice {
                test: sel.name(),
                error: e.to_string(),
                exit_code: e.exit_code(),
            }),
            Err(e) => return Err(e),
        }
    }
    let find = |k: TestKind| reports.iter().find(|r| r.test == k).map(|r| r.statistic);
    Ok(TestRun {
        dataset: DatasetSummary::of(req.data),
        design: req.design.label(),
        engine: EngineSummary::of(req.engine),
        rng: RngStream::ALGORITHM,
        alpha: req.alpha,
        d3: find(TestKind::FisherRandomization),
        z3: find(TestKind::NeymanRandomization),
        reports: reports.iter().map(|r| ReportRecord::of(r, req.alpha)).collect(),
        notices,
    })
}

/// Exit code of a notice produced by a core error, for callers that want
/// to surface it.
pub fn notice_code(e: &randcompare_core::Error) -> i32 {
    core_exit_code(e)
}
