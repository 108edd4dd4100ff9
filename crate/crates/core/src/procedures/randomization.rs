//! Tests whose only source of randomness is the assignment design.

use alloc::vec::Vec;

use super::process::is_constant;
use super::resample::{arm_one_positions, uniform_subset_pvalue, weighted_support_pvalue, SubsetSum, Tail};
use super::{PValueEngine, PValueKind, TestKind, TestReport};
use crate::designs::AssignmentDesign;
use crate::experiment::ObservedExperiment;
use crate::stats::{d_statistic, neyman_se, normal_two_sided, resolve_weights, WeightFamily};
use crate::{Error, Result};

fn check_design_length(observed: &ObservedExperiment, design: &AssignmentDesign) -> Result<()> {
    if design.n() != observed.len() {
        return Err(Error::LengthMismatch { expected: observed.len(), found: design.n() });
    }
    Ok(())
}

/// Fisher's randomization test of RUs with the Horvitz-Thompson difference
/// `D3`.
///
/// Under the sharp null the observed responses are fixed, so the reference
/// distribution is `D3` recomputed at every assignment the design can
/// produce, weighted by its probability. Every unit must have positive
/// inclusion probability under both treatments.
pub fn fisher_randomization_test(
    observed: &ObservedExperiment,
    design: &AssignmentDesign,
    engine: PValueEngine,
) -> Result<TestReport> {
    check_design_length(observed, design)?;
    design.check_positivity()?;
    let t = observed.assignment();
    let y = observed.responses();
    let weights = resolve_weights(WeightFamily::W3(design), observed.sample(), t)?;
    let statistic = d_statistic(y, t, &weights)?;
    let report = |p, kind| {
        TestReport::new(TestKind::FisherRandomization, statistic, p, kind, t.n1(), t.n2())
    };
    match design {
        AssignmentDesign::UniformCrd(crd) => {
            if crd.n1() != t.n1() {
                return Err(Error::InvalidDesign(alloc::format!(
                    "design assigns {} units to treatment 1 but {} were observed",
                    crd.n1(),
                    t.n1()
                )));
            }
            if is_constant(y) {
                return Ok(report(1.0, PValueKind::Exact).flag_degenerate());
            }
            let kernel = SubsetSum::difference(y, &weights);
            let reference = kernel.eval(&arm_one_positions(t));
            let (p, kind) = uniform_subset_pvalue(&kernel, crd.n1(), reference, Tail::Absolute, engine)?;
            Ok(report(p, kind))
        }
        AssignmentDesign::Explicit(e) => {
            let observed_prob = e
                .support()
                .iter()
                .zip(e.probs())
                .find(|(v, _)| *v == t)
                .map_or(0.0, |(_, &p)| p);
            if observed_prob <= 0.0 {
                return Err(Error::InvalidDesign(
                    "the observed assignment has probability zero under the design".into(),
                ));
            }
            let stats = e
                .support()
                .iter()
                .map(|v| d_statistic(y, v, &weights))
                .collect::<Result<Vec<f64>>>()?;
            let (p, kind) = weighted_support_pvalue(&stats, e.probs(), statistic, engine)?;
            let r = report(p, kind);
            Ok(if is_constant(y) && stats.iter().all(|&s| s == statistic) { r.flag_degenerate() } else { r })
        }
    }
}

/// Neyman's randomization test of RAs: `Z = D3 / SE` against `N(0, 1)`,
/// with the conservative standard error of [`neyman_se`]. Only the uniform
/// CRD is supported.
pub fn neyman_randomization_test(
    observed: &ObservedExperiment,
    design: &AssignmentDesign,
) -> Result<TestReport> {
    check_design_length(observed, design)?;
    let se = neyman_se(observed, design)?;
    let t = observed.assignment();
    let weights = resolve_weights(WeightFamily::W3(design), observed.sample(), t)?;
    let d = d_statistic(observed.responses(), t, &weights)?;
    z_report(TestKind::NeymanRandomization, d, se, t.n1(), t.n2())
}

pub(crate) fn z_report(test: TestKind, d: f64, se: f64, n1: usize, n2: usize) -> Result<TestReport> {
    if se == 0.0 {
        if d == 0.0 {
            return Ok(TestReport::new(test, 0.0, 1.0, PValueKind::Asymptotic, n1, n2).flag_degenerate());
        }
        return Err(Error::DegenerateData("both arms are constant with different values"));
    }
    let z = d / se;
    Ok(TestReport::new(test, z, normal_two_sided(z), PValueKind::Asymptotic, n1, n2))
}
