//! The `simulate` command: size/power runs on a thread pool.

use randcompare_core::designs::RngStream;
use randcompare_core::simulation::{EngineMode, PowerEstimate, Scenario, SimulationConfig, SimulationPlan};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;

/// Run every replicate of `plan` on `threads` workers (0 picks the number
/// of CPUs). Replicates draw from their own streams and the tally ignores
/// order, so the result does not depend on `threads`.
pub fn run_plan(plan: &SimulationPlan, threads: usize) -> Result<Vec<PowerEstimate>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))?;
    let tasks = plan.tasks();
    let outcomes = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(row, index)| plan.replicate(row, index))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(plan.tally(outcomes))
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateRecord {
    pub test: &'static str,
    pub row: &'static str,
    pub replicates: u64,
    pub rejections: Option<u64>,
    /// Percent; `null` when the test does not apply.
    pub rejection_rate: Option<f64>,
    pub mc_stderr: Option<f64>,
}

impl From<&PowerEstimate> for EstimateRecord {
    fn from(e: &PowerEstimate) -> Self {
        Self {
            test: e.test.name(),
            row: e.row.name(),
            replicates: e.replicates,
            rejections: e.rejections,
            rejection_rate: e.rejection_rate,
            mc_stderr: e.mc_stderr,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioRun {
    pub scenario: String,
    pub description: String,
    pub n1: usize,
    pub n2: usize,
    pub replicates: u64,
    pub alpha: f64,
    pub seed: u64,
    pub engine: String,
    pub estimates: Vec<EstimateRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationOutput {
    pub rng: &'static str,
    pub runs: Vec<ScenarioRun>,
}

pub fn engine_label(mode: EngineMode) -> String {
    match mode {
        EngineMode::Auto => "auto".into(),
        EngineMode::MonteCarlo(b) => format!("monte_carlo:{b}"),
        EngineMode::Exact => "exact".into(),
    }
}

pub fn simulate_scenario(
    scenario: &Scenario,
    config: &SimulationConfig,
    threads: usize,
) -> Result<ScenarioRun, CliError> {
    let plan = SimulationPlan::new(scenario, config)?;
    let estimates = run_plan(&plan, threads)?;
    Ok(ScenarioRun {
        scenario: scenario.name.clone(),
        description: scenario.description.clone(),
        n1: scenario.n1,
        n2: scenario.n2,
        replicates: config.replicates,
        alpha: config.alpha,
        seed: config.seed,
        engine: engine_label(config.engine),
        estimates: estimates.iter().map(EstimateRecord::from).collect(),
    })
}

pub fn simulate_all(
    scenarios: &[Scenario],
    config: &SimulationConfig,
    threads: usize,
) -> Result<SimulationOutput, CliError> {
    let runs = scenarios
        .iter()
        .map(|s| simulate_scenario(s, config, threads))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimulationOutput { rng: RngStream::ALGORITHM, runs })
}
