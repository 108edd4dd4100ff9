//! Size and power simulation over census populations.
//!
//! Every unit of an `N = n1 + n2` population is sampled and a uniform CRD
//! assigns `n1` of them to treatment 1. Two rows are estimated per test:
//!
//! - **Randomization**: the population is held fixed and the assignment is
//!   redrawn each replicate.
//! - **Process**: the assignment is held fixed and the population is redrawn
//!   each replicate.
//!
//! Random streams are derived from a single master seed:
//!
//! | stream | use |
//! |---|---|
//! | `0` | the fixed assignment (first CRD draw), then the fixed population |
//! | `1 + 2r` | randomization-row replicate `r` |
//! | `2 + 2r` | process-row replicate `r` |
//!
//! Each replicate is a pure function of `(seed, row, r)`, so replicates can
//! run in any order or in parallel and the tallies are unchanged.

use alloc::vec::Vec;

use libm::sqrt;
use rand::RngCore;

use crate::designs::{AssignmentDesign, RngStream, SelectionDesign, DEFAULT_ENUMERATION_CAP};
use crate::experiment::{AssignmentVector, ObservedExperiment, PotentialTable, SampleVector};
use crate::procedures::{
    fisher_exact_2x2, fisher_randomization_test, neyman_randomization_test, neyman_selection_test,
    permutation_test, pooled_t_test, welch_t_test, wilcoxon_test, PValueEngine, TestKind,
};
use crate::{Error, Result};

mod laws;
mod scenarios;

pub use laws::{random_deviates, random_pairs, ProcessLaw};
pub use scenarios::{
    fixed_binary_vectors, fixed_population, generate_population, registry, scenario,
    scenario_ids, Effect, Scenario,
};

/// Tests of the default size/power run, in column order.
pub const TABLE_COLUMNS: [TestKind; 6] = [
    TestKind::Permutation,
    TestKind::Wilcoxon,
    TestKind::WelchT,
    TestKind::PooledT,
    TestKind::FisherRandomization,
    TestKind::NeymanRandomization,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Row {
    Randomization,
    Process,
}

impl Row {
    pub const BOTH: [Row; 2] = [Row::Randomization, Row::Process];

    pub fn name(self) -> &'static str {
        match self {
            Row::Randomization => "randomization",
            Row::Process => "process",
        }
    }
}

/// Per-replicate p-value engine for the resampling tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    /// Monte Carlo with 10,000 draws when `N <= 20`, 4,000 otherwise.
    Auto,
    MonteCarlo(u64),
    /// Full enumeration (practical for `N = 20`).
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// At least 100.
    pub replicates: u64,
    pub alpha: f64,
    pub seed: u64,
    pub engine: EngineMode,
    pub tests: Vec<TestKind>,
    pub rows: Vec<Row>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            alpha: 0.05,
            seed: 11,
            engine: EngineMode::Auto,
            tests: TABLE_COLUMNS.to_vec(),
            rows: Row::BOTH.to_vec(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 100 {
            return Err(Error::Domain("at least 100 replicates are required"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Domain("alpha must lie in (0, 1]"));
        }
        if self.tests.is_empty() || self.rows.is_empty() {
            return Err(Error::Domain("nothing to simulate"));
        }
        if let EngineMode::MonteCarlo(b) = self.engine {
            PValueEngine::monte_carlo(b, 0)?;
        }
        Ok(())
    }
}

/// Rejection rate of one test over one row, in percent. `None` marks a test
/// that does not apply to the scenario (Wilcoxon on binary responses,
/// Fisher's exact test on continuous ones).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub test: TestKind,
    pub row: Row,
    pub replicates: u64,
    pub rejections: Option<u64>,
    pub rejection_rate: Option<f64>,
    /// `sqrt(r (100 - r) / replicates)`.
    pub mc_stderr: Option<f64>,
}

/// Rejection indicators of one replicate, aligned with the configured
/// tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicateOutcome {
    pub row: Row,
    pub index: u64,
    pub rejected: Vec<Option<bool>>,
}

/// A scenario with its fixed population and assignment resolved, ready to
/// run replicates.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    scenario: Scenario,
    config: SimulationConfig,
    design: AssignmentDesign,
    selection: SelectionDesign,
    sample: SampleVector,
    fixed_table: PotentialTable,
    fixed_assignment: AssignmentVector,
}

impl SimulationPlan {
    pub fn new(scenario: &Scenario, config: &SimulationConfig) -> Result<Self> {
        scenario.validate()?;
        config.validate()?;
        let n = scenario.n_units();
        let design = AssignmentDesign::uniform_crd(n, scenario.n1)?;
        let selection = SelectionDesign::census_crd(n, scenario.n1)?;
        let mut master = RngStream::new(config.seed);
        let fixed_assignment = design.sample_assignment(&mut master);
        let fixed_table = fixed_population(scenario, &mut master)?;
        Ok(Self {
            scenario: scenario.clone(),
            config: config.clone(),
            design,
            selection,
            sample: SampleVector::census(n)?,
            fixed_table,
            fixed_assignment,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn fixed_population(&self) -> &PotentialTable {
        &self.fixed_table
    }

    pub fn fixed_assignment(&self) -> &AssignmentVector {
        &self.fixed_assignment
    }

    /// Every `(row, replicate)` pair the plan covers.
    pub fn tasks(&self) -> Vec<(Row, u64)> {
        self.config
            .rows
            .iter()
            .flat_map(|&row| (0..self.config.replicates).map(move |r| (row, r)))
            .collect()
    }

    fn engine(&self, mc_seed: u64) -> PValueEngine {
        match self.config.engine {
            EngineMode::Auto => {
                let budget = if self.scenario.n_units() <= 20 { 10_000 } else { 4_000 };
                PValueEngine::MonteCarlo { budget, seed: mc_seed }
            }
            EngineMode::MonteCarlo(budget) => PValueEngine::MonteCarlo { budget, seed: mc_seed },
            EngineMode::Exact => PValueEngine::Exact { cap: DEFAULT_ENUMERATION_CAP },
        }
    }

    /// Run replicate `index` of `row`.
    ///
    /// Permutation and Fisher randomization share one Monte Carlo seed, so
    /// their p-values agree exactly. A t or Neyman statistic with zero
    /// standard error but a nonzero difference (both arms constant and
    /// different) counts as a rejection.
    pub fn replicate(&self, row: Row, index: u64) -> Result<ReplicateOutcome> {
        let stream = 1 + 2 * index + matches!(row, Row::Process) as u64;
        let mut rng = RngStream::substream(self.config.seed, stream);
        let observed = match row {
            Row::Randomization => {
                let t = self.design.sample_assignment(&mut rng);
                ObservedExperiment::observe(&self.fixed_table, self.sample.clone(), t)?
            }
            Row::Process => {
                let table = generate_population(&self.scenario, &mut rng)?;
                ObservedExperiment::observe(&table, self.sample.clone(), self.fixed_assignment.clone())?
            }
        };
        let engine = self.engine(rng.next_u64());
        let binary = self.scenario.is_binary();
        let alpha = self.config.alpha;
        let rejected = self
            .config
            .tests
            .iter()
            .map(|&test| {
                let report = match test {
                    TestKind::Permutation => permutation_test(&observed, engine),
                    TestKind::Wilcoxon if binary => return Ok(None),
                    TestKind::Wilcoxon => wilcoxon_test(&observed, engine),
                    TestKind::WelchT => welch_t_test(&observed),
                    TestKind::PooledT => pooled_t_test(&observed),
                    TestKind::FisherRandomization => {
                        fisher_randomization_test(&observed, &self.design, engine)
                    }
                    TestKind::NeymanRandomization => neyman_randomization_test(&observed, &self.design),
                    TestKind::NeymanSelection => neyman_selection_test(&observed, &self.selection),
                    TestKind::FisherExact2x2 if !binary => return Ok(None),
                    TestKind::FisherExact2x2 => fisher_exact_2x2(&observed),
                };
                match report {
                    Ok(r) => Ok(Some(r.rejects(alpha))),
                    Err(Error::DegenerateData(_)) => Ok(Some(true)),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReplicateOutcome { row, index, rejected })
    }

    /// Sum replicate outcomes into one estimate per `(row, test)`, ordered
    /// by configured row then configured test. The result does not depend
    /// on the order of `outcomes`.
    pub fn tally<I>(&self, outcomes: I) -> Vec<PowerEstimate>
    where
        I: IntoIterator<Item = ReplicateOutcome>,
    {
        let k = self.config.tests.len();
        let mut counts = alloc::vec![[0u64; 2]; k * 2];
        let mut seen = [0u64; 2];
        let slot = |row: Row| matches!(row, Row::Process) as usize;
        for o in outcomes {
            let s = slot(o.row);
            seen[s] += 1;
            for (i, r) in o.rejected.iter().enumerate() {
                match r {
                    Some(true) => counts[s * k + i][0] += 1,
                    Some(false) => {}
                    None => counts[s * k + i][1] += 1,
                }
            }
        }
        let mut out = Vec::new();
        for &row in &self.config.rows {
            let s = slot(row);
            for (i, &test) in self.config.tests.iter().enumerate() {
                let [rej, na] = counts[s * k + i];
                let reps = seen[s];
                let applicable = na == 0 && reps > 0;
                let rate = applicable.then(|| 100.0 * rej as f64 / reps as f64);
                out.push(PowerEstimate {
                    test,
                    row,
                    replicates: reps,
                    rejections: applicable.then_some(rej),
                    rejection_rate: rate,
                    mc_stderr: rate.map(|r| sqrt(r * (100.0 - r) / reps as f64)),
                });
            }
        }
        out
    }
}

/// Serial size/power run: every replicate of every configured row.
pub fn run_size_power(scenario: &Scenario, config: &SimulationConfig) -> Result<Vec<PowerEstimate>> {
    let plan = SimulationPlan::new(scenario, config)?;
    let outcomes = plan
        .tasks()
        .into_iter()
        .map(|(row, r)| plan.replicate(row, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(plan.tally(outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(id: &str, alpha: f64) -> Vec<PowerEstimate> {
        let config = SimulationConfig {
            replicates: 100,
            alpha,
            engine: EngineMode::MonteCarlo(1000),
            ..SimulationConfig::default()
        };
        run_size_power(&scenario(id).unwrap(), &config).unwrap()
    }

    #[test]
    fn alpha_one_rejects_everything() {
        for e in quick("t3.sc1", 1.0) {
            assert_eq!(e.rejection_rate, Some(100.0));
            assert_eq!(e.mc_stderr, Some(0.0));
        }
    }

    #[test]
    fn wilcoxon_is_na_on_binary() {
        for e in quick("t3.sc6", 0.05) {
            assert_eq!(e.rejection_rate.is_none(), e.test == TestKind::Wilcoxon);
        }
    }

    #[test]
    fn permutation_equals_fisher_and_stderr_formula() {
        let est = quick("t4.sc1", 0.05);
        for row in Row::BOTH {
            let get = |t| est.iter().find(|e| e.row == row && e.test == t).unwrap();
            assert_eq!(get(TestKind::Permutation).rejections, get(TestKind::FisherRandomization).rejections);
        }
        for e in &est {
            let r = e.rejection_rate.unwrap();
            assert!((e.mc_stderr.unwrap() - sqrt(r * (100.0 - r) / 100.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn neyman_randomization_equals_selection_per_replicate() {
        let config = SimulationConfig {
            replicates: 100,
            tests: alloc::vec![TestKind::NeymanRandomization, TestKind::NeymanSelection],
            ..SimulationConfig::default()
        };
        let plan = SimulationPlan::new(&scenario("t3.sc4").unwrap(), &config).unwrap();
        for (row, r) in plan.tasks() {
            let o = plan.replicate(row, r).unwrap();
            assert_eq!(o.rejected[0], o.rejected[1]);
        }
    }

    #[test]
    fn replicates_are_order_independent() {
        let config = SimulationConfig { replicates: 100, engine: EngineMode::MonteCarlo(1000), ..SimulationConfig::default() };
        let plan = SimulationPlan::new(&scenario("t3.sc2").unwrap(), &config).unwrap();
        let forward: Vec<_> = plan.tasks().into_iter().map(|(w, r)| plan.replicate(w, r).unwrap()).collect();
        let backward: Vec<_> = plan.tasks().into_iter().rev().map(|(w, r)| plan.replicate(w, r).unwrap()).collect();
        assert_eq!(plan.tally(forward), plan.tally(backward));
    }

    #[test]
    fn config_validation() {
        let bad = SimulationConfig { replicates: 99, ..SimulationConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SimulationConfig { alpha: 0.0, ..SimulationConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SimulationConfig { engine: EngineMode::MonteCarlo(10), ..SimulationConfig::default() };
        assert!(bad.validate().is_err());
    }
}
