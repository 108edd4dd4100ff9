use alloc::vec::Vec;

use libm::{exp, log};

use super::{PValueKind, TestKind, TestReport};
use crate::experiment::{ObservedExperiment, Treatment};
use crate::{Error, Result};

/// Two-sided Fisher exact test on the 2x2 table of arm by binary response.
///
/// With margins fixed, the treatment-1 success count `a` is hypergeometric.
/// The p-value sums the probabilities of every table no more likely than
/// the observed one (relative slack `1e-7`). Table probabilities come from
/// the ratio recurrence `P(k+1)/P(k) = (m-k)(n1-k) / ((k+1)(n-m-n1+k+1))`
/// in log space, so no factorials are formed.
pub fn fisher_exact_2x2(observed: &ObservedExperiment) -> Result<TestReport> {
    if !observed.is_binary() {
        return Err(Error::Domain("Fisher's exact test needs 0/1 responses"));
    }
    let t = observed.assignment();
    t.require_arms(1)?;
    let (n1, n) = (t.n1(), observed.len());
    let m = observed.responses().iter().filter(|&&y| y == 1.0).count();
    let a = observed.arm(Treatment::One).iter().filter(|&&y| y == 1.0).count();
    let stat = a as f64;
    if m == 0 || m == n {
        return Ok(TestReport::new(TestKind::FisherExact2x2, stat, 1.0, PValueKind::Exact, n1, t.n2())
            .flag_degenerate());
    }
    let lo = (n1 + m).saturating_sub(n);
    let hi = m.min(n1);
    let mut log_w: Vec<f64> = Vec::with_capacity(hi - lo + 1);
    log_w.push(0.0);
    for k in lo..hi {
        // `n + k + 1 >= m + n1` because `k >= lo`.
        let ratio = ((m - k) * (n1 - k)) as f64 / ((k + 1) * (n + k + 1 - m - n1)) as f64;
        let prev = *log_w.last().unwrap();
        log_w.push(prev + log(ratio));
    }
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|&l| exp(l - max)).collect();
    let total: f64 = w.iter().sum();
    let observed_w = w[a - lo];
    let extreme: f64 = w.iter().filter(|&&x| x <= observed_w * (1.0 + 1e-7)).sum();
    let p = (extreme / total).min(1.0);
    Ok(TestReport::new(TestKind::FisherExact2x2, stat, p, PValueKind::Exact, n1, t.n2()))
}
