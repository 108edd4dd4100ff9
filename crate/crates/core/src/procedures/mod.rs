//! The test procedures and their p-value engines.
//!
//! | procedure | statistic | hypothesis | reference distribution |
//! |---|---|---|---|
//! | [`permutation_test`] | `D1` | DUP | permutations of observed responses |
//! | [`wilcoxon_test`] | rank sum `W` | DUP | permutations of midranks |
//! | [`welch_t_test`] | `D1 / SE` | EUP | `t(nu)`, Welch-Satterthwaite `nu` |
//! | [`pooled_t_test`] | `D1 / SE_pooled` | EUP | `t(n - 2)` |
//! | [`fisher_randomization_test`] | `D3` | RUs | the assignment design |
//! | [`neyman_randomization_test`] | `D3 / SE` | RAs | `N(0, 1)` |
//! | [`neyman_selection_test`] | `D23 / SE` | RAP | `N(0, 1)` |
//! | [`fisher_exact_2x2`] | treatment-1 successes | RUs | hypergeometric |
//!
//! [`fisher_selection_test`] always fails with
//! [`Error::NoncomputableDistribution`](crate::Error::NoncomputableDistribution).

use alloc::vec::Vec;
use core::fmt;

use crate::designs::DEFAULT_ENUMERATION_CAP;
use crate::experiment::{Assumption, Hypothesis};
use crate::{Error, Result};

mod fisher_exact;
mod process;
mod randomization;
mod resample;
mod selection;

pub use fisher_exact::fisher_exact_2x2;
pub use process::{permutation_test, pooled_t_test, welch_t_test, wilcoxon_test};
pub use randomization::{fisher_randomization_test, neyman_randomization_test};
pub use resample::{monte_carlo_pvalue, TIE_RELATIVE_TOLERANCE};
pub use selection::{fisher_selection_test, neyman_selection_test};

/// Smallest Monte Carlo budget accepted.
pub const MIN_MONTE_CARLO_BUDGET: u64 = 1000;

/// How resampling procedures turn a statistic into a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueEngine {
    /// Full enumeration; errors when the support exceeds `cap`.
    Exact { cap: u128 },
    /// `budget` seeded draws from the reference distribution.
    MonteCarlo { budget: u64, seed: u64 },
    /// Exact when the support is at most `cap`, Monte Carlo otherwise.
    ExactOrMonteCarlo { cap: u128, budget: u64, seed: u64 },
    /// Only the normal / t approximations; resampling procedures refuse it.
    Asymptotic,
}

impl PValueEngine {
    pub fn exact() -> Self {
        Self::Exact { cap: DEFAULT_ENUMERATION_CAP }
    }

    pub fn monte_carlo(budget: u64, seed: u64) -> Result<Self> {
        if budget < MIN_MONTE_CARLO_BUDGET {
            return Err(Error::BudgetTooSmall(budget));
        }
        Ok(Self::MonteCarlo { budget, seed })
    }

    pub fn exact_or_monte_carlo(cap: u128, budget: u64, seed: u64) -> Result<Self> {
        if budget < MIN_MONTE_CARLO_BUDGET {
            return Err(Error::BudgetTooSmall(budget));
        }
        Ok(Self::ExactOrMonteCarlo { cap, budget, seed })
    }
}

/// Where a p-value came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValueKind {
    Exact,
    MonteCarlo { stderr: f64, draws: u64 },
    Asymptotic,
}

impl PValueKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PValueKind::Exact => "exact",
            PValueKind::MonteCarlo { .. } => "monte_carlo",
            PValueKind::Asymptotic => "asymptotic",
        }
    }

    pub fn stderr(&self) -> Option<f64> {
        match self {
            PValueKind::MonteCarlo { stderr, .. } => Some(*stderr),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestKind {
    Permutation,
    Wilcoxon,
    WelchT,
    PooledT,
    FisherRandomization,
    NeymanRandomization,
    NeymanSelection,
    FisherExact2x2,
}

impl TestKind {
    pub const ALL: [TestKind; 8] = [
        TestKind::FisherRandomization,
        TestKind::NeymanRandomization,
        TestKind::Permutation,
        TestKind::Wilcoxon,
        TestKind::WelchT,
        TestKind::PooledT,
        TestKind::NeymanSelection,
        TestKind::FisherExact2x2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Permutation => "permutation",
            TestKind::Wilcoxon => "wilcoxon",
            TestKind::WelchT => "welch",
            TestKind::PooledT => "pooled",
            TestKind::FisherRandomization => "fisher-rand",
            TestKind::NeymanRandomization => "neyman-rand",
            TestKind::NeymanSelection => "neyman-selection",
            TestKind::FisherExact2x2 => "fisher-exact",
        }
    }

    pub fn from_name(name: &str) -> Option<TestKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn hypothesis(self) -> Hypothesis {
        match self {
            TestKind::Permutation | TestKind::Wilcoxon => Hypothesis::Dup,
            TestKind::WelchT | TestKind::PooledT => Hypothesis::Eup,
            TestKind::FisherRandomization | TestKind::FisherExact2x2 => Hypothesis::RUs,
            TestKind::NeymanRandomization => Hypothesis::RAs,
            TestKind::NeymanSelection => Hypothesis::Rap,
        }
    }

    pub fn assumptions(self) -> &'static [Assumption] {
        use Assumption::*;
        match self {
            TestKind::Permutation => &[A1, A2, A3],
            TestKind::Wilcoxon => &[A1, A2, A3, A4],
            TestKind::WelchT => &[A1, A2, A3, A5],
            TestKind::PooledT => &[A1, A2, A3, A6],
            TestKind::FisherRandomization
            | TestKind::NeymanRandomization
            | TestKind::FisherExact2x2 => &[B1, B2],
            TestKind::NeymanSelection => &[C1, C2],
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub test: TestKind,
    pub hypothesis: Hypothesis,
    pub statistic: f64,
    /// Always within `[0, 1]`.
    pub p_value: f64,
    pub p_value_kind: PValueKind,
    pub assumptions: Vec<Assumption>,
    pub n1: usize,
    pub n2: usize,
    /// Set when the data carry no information (constant responses, zero
    /// difference with zero standard error); `p_value` is then 1.
    pub degenerate: bool,
}

impl TestReport {
    pub(crate) fn new(
        test: TestKind,
        statistic: f64,
        p_value: f64,
        p_value_kind: PValueKind,
        n1: usize,
        n2: usize,
    ) -> Self {
        Self {
            test,
            hypothesis: test.hypothesis(),
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            p_value_kind,
            assumptions: test.assumptions().to_vec(),
            n1,
            n2,
            degenerate: false,
        }
    }

    pub(crate) fn flag_degenerate(mut self) -> Self {
        self.degenerate = true;
        self
    }

    /// `p_value <= alpha`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}
