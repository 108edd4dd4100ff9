use libm::sqrt;

use crate::designs::AssignmentDesign;
use crate::experiment::{ObservedExperiment, Treatment};
use crate::{Error, Result};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sum_sq_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|&v| (v - m) * (v - m)).sum()
}

/// Variance with denominator `n - ddof`.
pub fn sample_variance(values: &[f64], ddof: usize) -> Result<f64> {
    let required = ddof + 1;
    if values.len() < required.max(2) {
        return Err(Error::InsufficientData { required: required.max(2), found: values.len() });
    }
    Ok(sum_sq_dev(values) / (values.len() - ddof) as f64)
}

/// Size, mean and unbiased variance of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

impl ArmSummary {
    /// `variance` is NaN for fewer than two values.
    pub fn of(values: &[f64]) -> Self {
        Self {
            n: values.len(),
            mean: mean(values),
            variance: sample_variance(values, 1).unwrap_or(f64::NAN),
        }
    }
}

fn check_arm(var: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("arm size must be positive"));
    }
    if !var.is_finite() || var < 0.0 {
        return Err(Error::Domain("variance must be finite and nonnegative"));
    }
    Ok(())
}

/// `sqrt(var1/n1 + var2/n2)`.
pub fn welch_se(var1: f64, n1: usize, var2: f64, n2: usize) -> Result<f64> {
    check_arm(var1, n1)?;
    check_arm(var2, n2)?;
    Ok(sqrt(var1 / n1 as f64 + var2 / n2 as f64))
}

/// Welch-Satterthwaite degrees of freedom.
pub fn welch_df(var1: f64, n1: usize, var2: f64, n2: usize) -> Result<f64> {
    check_arm(var1, n1)?;
    check_arm(var2, n2)?;
    if n1 < 2 || n2 < 2 {
        return Err(Error::Domain("Welch degrees of freedom need both arms of size >= 2"));
    }
    let a = var1 / n1 as f64;
    let b = var2 / n2 as f64;
    if a + b == 0.0 {
        return Err(Error::DegenerateData("both arm variances are zero"));
    }
    Ok((a + b) * (a + b) / (a * a / (n1 - 1) as f64 + b * b / (n2 - 1) as f64))
}

/// `sqrt(s_p^2 (1/n1 + 1/n2))` with the pooled variance
/// `s_p^2 = ((n1-1) var1 + (n2-1) var2) / (n1 + n2 - 2)`.
pub fn pooled_se(var1: f64, n1: usize, var2: f64, n2: usize) -> Result<f64> {
    check_arm(var1, n1)?;
    check_arm(var2, n2)?;
    if n1 + n2 < 3 {
        return Err(Error::Domain("pooled variance needs n1 + n2 >= 3"));
    }
    let pooled = ((n1 - 1) as f64 * var1 + (n2 - 1) as f64 * var2) / (n1 + n2 - 2) as f64;
    Ok(sqrt(pooled * (1.0 / n1 as f64 + 1.0 / n2 as f64)))
}

/// Neyman's conservative standard error for the difference statistic under
/// a uniform completely randomized design:
///
/// ```text
/// SE^2 = sum_t  v_t / n_t,    v_t = (1/n_t) sum_{j: t_j = t} (y_j - ybar_t)^2
/// ```
///
/// The arm variances use the `n_t` denominator, giving `SE = 19.30` on the
/// bundled cell-phone data. The bound is tight under
/// unit-treatment additivity. Other designs are refused: no estimator is
/// established for general inclusion probabilities.
pub fn neyman_se(observed: &ObservedExperiment, design: &AssignmentDesign) -> Result<f64> {
    let crd = design.as_uniform_crd().ok_or(Error::UnsupportedDesign(
        "the Neyman variance bound is only available for the uniform completely randomized \
         design; its form under general inclusion probabilities is an open problem",
    ))?;
    if crd.n() != observed.len() {
        return Err(Error::LengthMismatch { expected: observed.len(), found: crd.n() });
    }
    if crd.n1() != observed.assignment().n1() {
        return Err(Error::InvalidDesign(alloc::format!(
            "design has n1 = {} but the observed assignment has n1 = {}",
            crd.n1(),
            observed.assignment().n1()
        )));
    }
    observed.assignment().require_arms(2)?;
    let mut var = 0.0;
    for t in Treatment::BOTH {
        let arm = observed.arm(t);
        let n = arm.len() as f64;
        var += sum_sq_dev(&arm) / (n * n);
    }
    Ok(sqrt(var))
}
