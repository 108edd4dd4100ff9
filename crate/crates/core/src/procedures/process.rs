//! Tests that treat the two arms as samples from two processes.

use alloc::vec::Vec;

use libm::sqrt;

use super::resample::{arm_one_positions, uniform_subset_pvalue, SubsetSum, Tail};
use super::{PValueEngine, PValueKind, TestKind, TestReport};
use crate::designs::binomial_coefficient;
use crate::experiment::{ObservedExperiment, Treatment};
use crate::stats::{
    d_statistic, normal_cdf, pooled_se, rank_midranks, rank_sum_statistic, resolve_weights,
    student_t_two_sided, welch_df, welch_se, ArmSummary, WeightFamily,
};
use crate::{Error, Result};

/// Largest `(n1 + 1) * (n (n + 1) + 1)` table the exact rank-sum recursion
/// will allocate.
const RANK_DP_CELL_LIMIT: usize = 20_000_000;

pub(crate) fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

fn constant_report(test: TestKind, statistic: f64, obs: &ObservedExperiment) -> TestReport {
    let a = obs.assignment();
    TestReport::new(test, statistic, 1.0, PValueKind::Exact, a.n1(), a.n2()).flag_degenerate()
}

/// Two-sample permutation test of DUP on the difference of means `D1`.
///
/// The reference distribution is `D1` over all `C(n, n1)` relabelings of the
/// observed responses (or `budget` uniform draws from them). Under a uniform
/// CRD this is the same computation as [`fisher_randomization_test`], and
/// with equal engines the two return identical p-values.
///
/// [`fisher_randomization_test`]: super::fisher_randomization_test
pub fn permutation_test(observed: &ObservedExperiment, engine: PValueEngine) -> Result<TestReport> {
    let t = observed.assignment();
    t.require_arms(1)?;
    let weights = resolve_weights(WeightFamily::W1, observed.sample(), t)?;
    let y = observed.responses();
    let statistic = d_statistic(y, t, &weights)?;
    if is_constant(y) {
        return Ok(constant_report(TestKind::Permutation, statistic, observed));
    }
    let kernel = SubsetSum::difference(y, &weights);
    let reference = kernel.eval(&arm_one_positions(t));
    let (p, kind) = uniform_subset_pvalue(&kernel, t.n1(), reference, Tail::Absolute, engine)?;
    Ok(TestReport::new(TestKind::Permutation, statistic, p, kind, t.n1(), t.n2()))
}

/// Wilcoxon rank-sum test of DUP.
///
/// `W` is the treatment-1 sum of midranks and
/// `p = min(1, 2 min(P(W' >= W), P(W' <= W)))` over random relabelings.
///
/// - `Exact` and `ExactOrMonteCarlo` count the null distribution exactly by
///   a subset-sum recursion on doubled midranks, which needs no enumeration
///   and so ignores `cap`. Very large samples fall back to the engine's
///   enumeration / Monte Carlo rules.
/// - `MonteCarlo` draws relabelings.
/// - `Asymptotic` is the tie-corrected normal approximation with continuity
///   correction.
///
/// All-identical responses give `p = 1` with the degenerate flag.
pub fn wilcoxon_test(observed: &ObservedExperiment, engine: PValueEngine) -> Result<TestReport> {
    let t = observed.assignment();
    t.require_arms(1)?;
    let y = observed.responses();
    let ranks = rank_midranks(y);
    let w = rank_sum_statistic(&ranks, t)?;
    if is_constant(y) {
        return Ok(constant_report(TestKind::Wilcoxon, w, observed));
    }
    let (n, n1) = (y.len(), t.n1());
    let report = |p, kind| TestReport::new(TestKind::Wilcoxon, w, p, kind, n1, t.n2());
    let dp_fits = binomial_coefficient(n as u64, n1 as u64).is_ok()
        && (n1 + 1).saturating_mul(n * (n + 1) + 1) <= RANK_DP_CELL_LIMIT;
    match engine {
        PValueEngine::Asymptotic => Ok(report(rank_sum_normal_pvalue(&ranks, n1, w), PValueKind::Asymptotic)),
        PValueEngine::Exact { .. } | PValueEngine::ExactOrMonteCarlo { .. } if dp_fits => {
            Ok(report(rank_sum_exact_pvalue(&ranks, n1, w), PValueKind::Exact))
        }
        _ => {
            let kernel = SubsetSum::plain(ranks);
            let (p, kind) = uniform_subset_pvalue(&kernel, n1, w, Tail::DoubledMin, engine)?;
            Ok(report(p, kind))
        }
    }
}

/// Exact doubled-minimum-tail p-value of the rank sum. Midranks are
/// multiples of one half, so doubled ranks are integers and
/// `count[k][s]` (number of `k`-subsets with doubled sum `s`) is exact.
fn rank_sum_exact_pvalue(ranks: &[f64], n1: usize, w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|&r| libm::round(2.0 * r) as usize).collect();
    let total_sum: usize = doubled.iter().sum();
    let width = total_sum + 1;
    let mut count = alloc::vec![0u128; (n1 + 1) * width];
    count[0] = 1;
    let mut reach = 0;
    for (i, &v) in doubled.iter().enumerate() {
        reach += v;
        for k in (1..=n1.min(i + 1)).rev() {
            for s in (v..=reach).rev() {
                let add = count[(k - 1) * width + s - v];
                if add != 0 {
                    count[k * width + s] += add;
                }
            }
        }
    }
    let target = libm::round(2.0 * w) as usize;
    let row = &count[n1 * width..];
    let total: u128 = row.iter().sum();
    let upper: u128 = row[target..].iter().sum();
    let lower: u128 = row[..=target].iter().sum();
    (2.0 * (upper.min(lower) as f64) / total as f64).min(1.0)
}

fn rank_sum_normal_pvalue(ranks: &[f64], n1: usize, w: f64) -> f64 {
    let n = ranks.len() as f64;
    let (n1f, n2f) = (n1 as f64, n - n1 as f64);
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    for group in sorted.chunk_by(|a, b| a == b) {
        let c = group.len() as f64;
        ties += c * c * c - c;
    }
    let var = n1f * n2f / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let centered = w - n1f * (n + 1.0) / 2.0;
    let corrected = (centered.abs() - 0.5).max(0.0);
    (2.0 * normal_cdf(-corrected / sqrt(var))).min(1.0)
}

fn t_report(
    test: TestKind,
    observed: &ObservedExperiment,
    diff: f64,
    se: f64,
    df: impl FnOnce() -> Result<f64>,
) -> Result<TestReport> {
    let t = observed.assignment();
    if se == 0.0 {
        if diff == 0.0 {
            return Ok(TestReport::new(test, 0.0, 1.0, PValueKind::Asymptotic, t.n1(), t.n2())
                .flag_degenerate());
        }
        return Err(Error::DegenerateData("both arms are constant with different values"));
    }
    let stat = diff / se;
    let p = student_t_two_sided(stat, df()?)?;
    Ok(TestReport::new(test, stat, p, PValueKind::Asymptotic, t.n1(), t.n2()))
}

fn arm_summaries(observed: &ObservedExperiment) -> Result<(ArmSummary, ArmSummary)> {
    observed.assignment().require_arms(2)?;
    Ok((
        ArmSummary::of(&observed.arm(Treatment::One)),
        ArmSummary::of(&observed.arm(Treatment::Two)),
    ))
}

/// Welch's unequal-variance t test of EUP:
/// `T = (ybar1 - ybar2) / sqrt(s1^2/n1 + s2^2/n2)` against `t(nu)` with the
/// Welch-Satterthwaite `nu`.
pub fn welch_t_test(observed: &ObservedExperiment) -> Result<TestReport> {
    let (a, b) = arm_summaries(observed)?;
    let se = welch_se(a.variance, a.n, b.variance, b.n)?;
    t_report(TestKind::WelchT, observed, a.mean - b.mean, se, || {
        welch_df(a.variance, a.n, b.variance, b.n)
    })
}

/// Pooled-variance t test of EUP against `t(n1 + n2 - 2)`.
pub fn pooled_t_test(observed: &ObservedExperiment) -> Result<TestReport> {
    let (a, b) = arm_summaries(observed)?;
    let se = pooled_se(a.variance, a.n, b.variance, b.n)?;
    t_report(TestKind::PooledT, observed, a.mean - b.mean, se, || Ok((a.n + b.n - 2) as f64))
}
