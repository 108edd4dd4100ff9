//! Shared exact / Monte Carlo machinery for statistics of the form
//! `sum_{j in A} v_j - offset`, where `A` is the set of treatment-1
//! positions.

use alloc::vec::Vec;

use libm::sqrt;

use super::{PValueEngine, PValueKind, MIN_MONTE_CARLO_BUDGET};
use crate::designs::{binomial_coefficient, partial_shuffle, KSubsets, RngStream};
use crate::experiment::{AssignmentVector, Treatment};
use crate::stats::WeightTable;
use crate::{Error, Result};

/// A resampled statistic within this relative distance of the observed one
/// counts as a tie, hence as extreme. The distance is relative to the
/// larger of the observed value and the magnitude of the terms the
/// statistic is summed from, so that an observed value that is zero up to
/// rounding still ties with the other zeros.
pub const TIE_RELATIVE_TOLERANCE: f64 = 1e-9;

fn tol(observed: f64, scale: f64) -> f64 {
    TIE_RELATIVE_TOLERANCE * observed.abs().max(scale)
}

pub(crate) fn abs_at_least(stat: f64, observed: f64, scale: f64) -> bool {
    let (s, o) = (stat.abs(), observed.abs());
    s >= o || o - s <= tol(o, scale)
}

fn at_least(stat: f64, observed: f64, scale: f64) -> bool {
    stat >= observed || observed - stat <= tol(observed, scale)
}

fn at_most(stat: f64, observed: f64, scale: f64) -> bool {
    stat <= observed || stat - observed <= tol(observed, scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tail {
    /// `P(|S| >= |s_obs|)`.
    Absolute,
    /// `min(1, 2 min(P(S >= s_obs), P(S <= s_obs)))`.
    DoubledMin,
}

#[derive(Debug, Clone, Copy)]
struct TailCounter {
    tail: Tail,
    observed: f64,
    scale: f64,
    extreme: u64,
    upper: u64,
    lower: u64,
    total: u64,
}

impl TailCounter {
    fn new(tail: Tail, observed: f64, scale: f64) -> Self {
        Self { tail, observed, scale, extreme: 0, upper: 0, lower: 0, total: 0 }
    }

    fn push(&mut self, stat: f64) {
        self.total += 1;
        match self.tail {
            Tail::Absolute => self.extreme += abs_at_least(stat, self.observed, self.scale) as u64,
            Tail::DoubledMin => {
                self.upper += at_least(stat, self.observed, self.scale) as u64;
                self.lower += at_most(stat, self.observed, self.scale) as u64;
            }
        }
    }

    fn exact(&self) -> f64 {
        let m = self.total as f64;
        match self.tail {
            Tail::Absolute => self.extreme as f64 / m,
            Tail::DoubledMin => (2.0 * self.upper.min(self.lower) as f64 / m).min(1.0),
        }
    }

    /// Add-one estimate `(1 + count) / (B + 1)` and its binomial standard
    /// error.
    fn monte_carlo(&self) -> (f64, f64) {
        let b = self.total as f64;
        let add_one = |c: u64| (c as f64 + 1.0) / (b + 1.0);
        match self.tail {
            Tail::Absolute => {
                let p = add_one(self.extreme);
                (p, sqrt(p * (1.0 - p) / b))
            }
            Tail::DoubledMin => {
                let q = add_one(self.upper.min(self.lower));
                ((2.0 * q).min(1.0), 2.0 * sqrt(q * (1.0 - q) / b))
            }
        }
    }
}

/// `sum_{j in A} values[j] - offset`.
#[derive(Debug, Clone)]
pub(crate) struct SubsetSum {
    values: Vec<f64>,
    offset: f64,
}

impl SubsetSum {
    /// Rank sum of treatment-1 positions.
    pub(crate) fn plain(values: Vec<f64>) -> Self {
        Self { values, offset: 0.0 }
    }

    /// The weighted difference statistic, rewritten as
    /// `sum_{A} (y_j/w(1,j) + y_j/w(2,j)) - sum_j y_j/w(2,j)`.
    /// Every weight must be positive.
    pub(crate) fn difference(responses: &[f64], weights: &WeightTable) -> Self {
        let mut offset = 0.0;
        let values = responses
            .iter()
            .zip(weights.rows())
            .map(|(&y, w)| {
                let b = y / w[1];
                offset += b;
                y / w[0] + b
            })
            .collect();
        Self { values, offset }
    }

    pub(crate) fn eval(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&j| self.values[j]).sum::<f64>() - self.offset
    }

    pub(crate) fn n(&self) -> usize {
        self.values.len()
    }

    /// `sum_j |values[j]| + |offset|`, a bound on every evaluation.
    pub(crate) fn scale(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() + self.offset.abs()
    }
}

/// Zero-based treatment-1 positions of an assignment.
pub(crate) fn arm_one_positions(assignment: &AssignmentVector) -> Vec<usize> {
    assignment
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &t)| t == Treatment::One)
        .map(|(j, _)| j)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Plan {
    Exact,
    MonteCarlo { budget: u64, seed: u64 },
}

/// Decide between exact and Monte Carlo given the support size (`None`
/// means it overflows `u128`).
pub(crate) fn plan(engine: PValueEngine, support: Option<u128>) -> Result<Plan> {
    let fits = |cap: u128| matches!(support, Some(s) if s <= cap);
    match engine {
        PValueEngine::Exact { cap } if fits(cap) => Ok(Plan::Exact),
        PValueEngine::Exact { cap } => Err(Error::EnumerationTooLarge { support, cap }),
        PValueEngine::MonteCarlo { budget, seed } => {
            check_budget(budget)?;
            Ok(Plan::MonteCarlo { budget, seed })
        }
        PValueEngine::ExactOrMonteCarlo { cap, .. } if fits(cap) => Ok(Plan::Exact),
        PValueEngine::ExactOrMonteCarlo { budget, seed, .. } => {
            check_budget(budget)?;
            Ok(Plan::MonteCarlo { budget, seed })
        }
        PValueEngine::Asymptotic => Err(Error::EngineNotApplicable(
            "resampling procedures need an exact or Monte Carlo engine",
        )),
    }
}

fn check_budget(budget: u64) -> Result<()> {
    if budget < MIN_MONTE_CARLO_BUDGET {
        Err(Error::BudgetTooSmall(budget))
    } else {
        Ok(())
    }
}

/// p-value of `kernel` at the observed subset over the uniform distribution
/// of `k`-subsets of its positions.
pub(crate) fn uniform_subset_pvalue(
    kernel: &SubsetSum,
    k: usize,
    observed: f64,
    tail: Tail,
    engine: PValueEngine,
) -> Result<(f64, PValueKind)> {
    let n = kernel.n();
    let support = binomial_coefficient(n as u64, k as u64).ok();
    let mut counter = TailCounter::new(tail, observed, kernel.scale());
    match plan(engine, support)? {
        Plan::Exact => {
            let mut subsets = KSubsets::new(n, k);
            while let Some(subset) = subsets.next_subset() {
                counter.push(kernel.eval(subset));
            }
            Ok((counter.exact(), PValueKind::Exact))
        }
        Plan::MonteCarlo { budget, seed } => {
            let mut rng = RngStream::new(seed);
            let mut positions: Vec<usize> = (0..n).collect();
            for _ in 0..budget {
                partial_shuffle(&mut positions, k, &mut rng);
                counter.push(kernel.eval(&positions[..k]));
            }
            let (p, stderr) = counter.monte_carlo();
            Ok((p, PValueKind::MonteCarlo { stderr, draws: budget }))
        }
    }
}

/// p-value over an explicit finite distribution of statistic values.
pub(crate) fn weighted_support_pvalue(
    stats: &[f64],
    probs: &[f64],
    observed: f64,
    engine: PValueEngine,
) -> Result<(f64, PValueKind)> {
    let scale = stats.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    match plan(engine, Some(stats.len() as u128))? {
        Plan::Exact => {
            let p = stats
                .iter()
                .zip(probs)
                .filter(|(&s, _)| abs_at_least(s, observed, scale))
                .map(|(_, &p)| p)
                .sum::<f64>();
            Ok((p.min(1.0), PValueKind::Exact))
        }
        Plan::MonteCarlo { budget, seed } => {
            let mut rng = RngStream::new(seed);
            let mut cumulative = Vec::with_capacity(probs.len());
            let mut acc = 0.0;
            for &p in probs {
                acc += p;
                cumulative.push(acc);
            }
            let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
            let (p, stderr) = monte_carlo_pvalue(
                observed,
                |rng| {
                    let u: f64 = rand::Rng::random(rng);
                    let i = cumulative.partition_point(|&c| c <= u).min(last);
                    stats[i]
                },
                budget,
                &mut rng,
            )?;
            Ok((p, PValueKind::MonteCarlo { stderr, draws: budget }))
        }
    }
}

/// Monte Carlo two-sided p-value with the add-one correction:
/// `p = (1 + #{|draw| >= |observed|}) / (budget + 1)` and
/// `stderr = sqrt(p (1 - p) / budget)`.
pub fn monte_carlo_pvalue<F>(
    observed_stat: f64,
    mut sampler: F,
    budget: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)>
where
    F: FnMut(&mut RngStream) -> f64,
{
    check_budget(budget)?;
    let mut counter = TailCounter::new(Tail::Absolute, observed_stat, observed_stat.abs());
    for _ in 0..budget {
        counter.push(sampler(rng));
    }
    Ok(counter.monte_carlo())
}
