//! Tests that also account for selecting the sample from a population.

use super::randomization::z_report;
use super::{TestKind, TestReport};
use crate::designs::SelectionDesign;
use crate::experiment::ObservedExperiment;
use crate::stats::{d_statistic, neyman_se, resolve_weights, WeightFamily};
use crate::{Error, Result};

/// Fisher's selection test of RUP. Its reference distribution needs the
/// responses of units outside the sample, which the sharp null does not
/// pin down, so it cannot be computed from observed data. Always fails with
/// [`Error::NoncomputableDistribution`], whose message names the tests to
/// use instead.
pub fn fisher_selection_test(
    _observed: &ObservedExperiment,
    _design: &SelectionDesign,
) -> Result<TestReport> {
    Err(Error::NoncomputableDistribution)
}

/// Neyman's selection test of RAP: `Z = D23 / SE` against `N(0, 1)`.
///
/// Supported only for a census (`S = P` with probability one) combined with
/// a uniform CRD, where the statistic coincides with the Neyman
/// randomization statistic.
pub fn neyman_selection_test(
    observed: &ObservedExperiment,
    design: &SelectionDesign,
) -> Result<TestReport> {
    let census = design.as_census_crd().ok_or(Error::UnsupportedDesign(
        "the Neyman selection test is only available for a census with a uniform completely \
         randomized assignment",
    ))?;
    observed.sample().check_within(census.n_units())?;
    if observed.len() != census.n_units() {
        return Err(Error::LengthMismatch { expected: census.n_units(), found: observed.len() });
    }
    let t = observed.assignment();
    let weights = resolve_weights(WeightFamily::W23(design), observed.sample(), t)?;
    let d = d_statistic(observed.responses(), t, &weights)?;
    let se = neyman_se(observed, &census.assignment_design())?;
    z_report(TestKind::NeymanSelection, d, se, t.n1(), t.n2())
}
